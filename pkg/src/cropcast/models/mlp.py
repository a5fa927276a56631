"""Single-hidden-layer perceptron regressor with hand-written backprop.

Architecture: input -> 10 ReLU units -> linear output of horizon width,
squared-error loss.  The default solver is limited-memory quasi-Newton
with a strong-Wolfe line search; the learning-rate-driven adam solver is
the fallback.  Training is deterministic given (data, config).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .._threads import single_thread_blas
from ..errors import ShapeError, ValidationError
from ..features import SupervisedSet
from .common import (SOLVER_ADAM, TrainConfig, adam_minimize, flatten_params,
                     glorot_uniform, model_seed, relu, unflatten_params)

DEFAULT_HIDDEN = 10


@dataclass(frozen=True)
class MlpModel:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    target_mean: float = 0.0
    target_scale: float = 1.0
    seed: int = 0
    loss_history: tuple = ()
    converged: bool = True
    trained_through: int = -1

    def __post_init__(self):
        for name in ("w1", "b1", "w2", "b2"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not all(np.isfinite(getattr(self, n)).all() for n in ("w1", "b1", "w2", "b2")):
            raise ValidationError("model parameters must be finite")

    @property
    def input_width(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden(self) -> int:
        return self.w1.shape[1]

    @property
    def horizon(self) -> int:
        return self.w2.shape[1]

    # -- generic parameter-vector interface used by the gradient checker --

    @property
    def shapes(self) -> list:
        return [self.w1.shape, self.b1.shape, self.w2.shape, self.b2.shape]

    def param_vector(self) -> np.ndarray:
        return flatten_params([self.w1, self.b1, self.w2, self.b2])

    def with_params(self, vector: np.ndarray) -> "MlpModel":
        w1, b1, w2, b2 = unflatten_params(vector, self.shapes)
        return replace(self, w1=w1, b1=b1, w2=w2, b2=b2)

    def loss_and_grad(self, inputs: np.ndarray, targets: np.ndarray):
        return _loss_grad(self.param_vector(), inputs, targets, self.shapes)


def _init_vector(input_width: int, hidden: int, horizon: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    w1 = glorot_uniform(rng, input_width, hidden, (input_width, hidden))
    b1 = np.zeros(hidden)
    w2 = glorot_uniform(rng, hidden, horizon, (hidden, horizon))
    b2 = np.zeros(horizon)
    return flatten_params([w1, b1, w2, b2])


def _loss_grad(theta: np.ndarray, x: np.ndarray, y: np.ndarray, shapes):
    w1, b1, w2, b2 = unflatten_params(theta, shapes)
    z1 = x @ w1 + b1
    a1 = relu(z1)
    pred = a1 @ w2 + b2
    resid = pred - y
    loss = float(np.mean(resid * resid))
    dpred = (2.0 / resid.size) * resid
    dw2 = a1.T @ dpred
    db2 = dpred.sum(axis=0)
    da1 = dpred @ w2.T
    dz1 = da1 * (z1 > 0)
    dw1 = x.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, flatten_params([dw1, db1, dw2, db2])


def _loss_only(theta: np.ndarray, x: np.ndarray, y: np.ndarray, shapes) -> float:
    w1, b1, w2, b2 = unflatten_params(theta, shapes)
    resid = relu(x @ w1 + b1) @ w2 + b2 - y
    return float(np.mean(resid * resid))


def mlp_train(data: SupervisedSet, cfg: TrainConfig | None = None,
              hidden: int = DEFAULT_HIDDEN, seed: int | None = None,
              trained_through: int = -1) -> MlpModel:
    """Fit the perceptron on a supervised set.

    A line-search failure does not raise: the best parameters found are
    returned with ``converged=False``.
    """
    cfg = cfg or TrainConfig()
    x, y = data.inputs, data.targets
    if len(data) < 1:
        raise ValidationError("training needs at least one row")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValidationError("training data must be finite")
    init_seed = model_seed(cfg).integers(2 ** 63) if seed is None else int(seed)
    shapes = [(x.shape[1], hidden), (hidden,), (hidden, y.shape[1]), (y.shape[1],)]
    theta0 = _init_vector(x.shape[1], hidden, y.shape[1], init_seed)

    with single_thread_blas():
        if cfg.solver == SOLVER_ADAM:
            theta, history = adam_minimize(
                lambda t: _loss_grad(t, x, y, shapes), theta0,
                steps=cfg.max_iter, lr=cfg.learning_rate)
            converged = True
        else:
            history = [_loss_only(theta0, x, y, shapes)]
            result = minimize(
                _loss_grad, theta0, args=(x, y, shapes), jac=True, method="L-BFGS-B",
                callback=lambda tk: history.append(_loss_only(tk, x, y, shapes)),
                options={"maxiter": cfg.max_iter, "gtol": cfg.tolerance, "ftol": 1e-14})
            theta = result.x
            converged = bool(result.success)

    w1, b1, w2, b2 = unflatten_params(theta, shapes)
    return MlpModel(w1=w1, b1=b1, w2=w2, b2=b2,
                    target_mean=data.target_mean, target_scale=data.target_scale,
                    seed=init_seed, loss_history=tuple(history),
                    converged=converged, trained_through=trained_through)


def mlp_predict(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Forecast in currency units from one flattened input row."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_width,):
        raise ShapeError(
            f"input width {x.shape} does not match model ({model.input_width},)")
    hidden = relu(x @ model.w1 + model.b1)
    z = hidden @ model.w2 + model.b2
    return z * model.target_scale + model.target_mean
