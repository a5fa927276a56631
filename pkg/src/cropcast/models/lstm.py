"""Two-layer stacked LSTM encoder with a dense forecasting head.

The cell keeps sigmoid gates and applies ReLU where tanh would normally
sit (candidate and cell-output activation).  The dense head reads the last
time step of the second layer and emits the whole horizon at once.
Training is full-batch adaptive-moment descent over a fixed epoch budget,
deterministic given the seed.  Backpropagation through time is written by
hand and verified against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .._threads import single_thread_blas
from ..errors import ShapeError, ValidationError
from ..features import SupervisedSet
from .common import (TrainConfig, adam_minimize, flatten_params,
                     glorot_uniform, model_seed, relu, sigmoid,
                     unflatten_params)

DEFAULT_UNITS = (100, 100)
DEFAULT_EPOCHS = 200


@dataclass(frozen=True)
class LstmModel:
    layers: tuple          # per layer: dict(wx, wh, b)
    wd: np.ndarray
    bd: np.ndarray
    k: int
    input_width: int
    target_mean: float = 0.0
    target_scale: float = 1.0
    seed: int = 0
    loss_history: tuple = ()
    trained_through: int = -1

    def __post_init__(self):
        frozen_layers = []
        for layer in self.layers:
            frozen = {}
            for key, arr in layer.items():
                arr = np.asarray(arr, dtype=float).copy()
                arr.setflags(write=False)
                frozen[key] = arr
            frozen_layers.append(frozen)
        object.__setattr__(self, "layers", tuple(frozen_layers))
        for name in ("wd", "bd"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def units(self) -> tuple:
        return tuple(layer["wh"].shape[0] for layer in self.layers)

    @property
    def horizon(self) -> int:
        return self.wd.shape[1]

    @property
    def shapes(self) -> list:
        shapes = []
        for layer in self.layers:
            shapes += [layer["wx"].shape, layer["wh"].shape, layer["b"].shape]
        shapes += [self.wd.shape, self.bd.shape]
        return shapes

    def param_vector(self) -> np.ndarray:
        arrays = []
        for layer in self.layers:
            arrays += [layer["wx"], layer["wh"], layer["b"]]
        arrays += [self.wd, self.bd]
        return flatten_params(arrays)

    def with_params(self, vector: np.ndarray) -> "LstmModel":
        parts = unflatten_params(vector, self.shapes)
        layers = []
        for i in range(len(self.layers)):
            wx, wh, b = parts[3 * i:3 * i + 3]
            layers.append({"wx": wx, "wh": wh, "b": b})
        return replace(self, layers=tuple(layers), wd=parts[-2], bd=parts[-1])

    def loss_and_grad(self, inputs: np.ndarray, targets: np.ndarray):
        return _loss_grad(self.param_vector(), inputs, targets,
                          self.shapes, len(self.layers))


def _init_arrays(input_width: int, units, horizon: int, seed: int):
    rng = np.random.default_rng(seed)
    arrays = []
    fan_in = input_width
    for u in units:
        wx = glorot_uniform(rng, fan_in, 4 * u, (fan_in, 4 * u))
        wh = glorot_uniform(rng, u, 4 * u, (u, 4 * u))
        b = np.zeros(4 * u)
        b[u:2 * u] = 1.0  # forget-gate bias starts open
        arrays += [wx, wh, b]
        fan_in = u
    wd = glorot_uniform(rng, fan_in, horizon, (fan_in, horizon))
    bd = np.zeros(horizon)
    arrays += [wd, bd]
    return arrays


def _layer_forward(x: np.ndarray, wx: np.ndarray, wh: np.ndarray, b: np.ndarray):
    """Run one LSTM layer over (N, T, fan_in); returns outputs and caches."""
    n, t_steps, _ = x.shape
    u = wh.shape[0]
    h = np.zeros((n, u))
    c = np.zeros((n, u))
    cache = []
    outputs = np.empty((n, t_steps, u))
    for t in range(t_steps):
        z = x[:, t, :] @ wx + h @ wh + b
        zi, zf, zg, zo = z[:, :u], z[:, u:2 * u], z[:, 2 * u:3 * u], z[:, 3 * u:]
        gi, gf, go = sigmoid(zi), sigmoid(zf), sigmoid(zo)
        gg = relu(zg)
        c_prev = c
        c = gf * c_prev + gi * gg
        act_c = relu(c)
        h_prev_cache = h
        h = go * act_c
        outputs[:, t, :] = h
        cache.append((x[:, t, :], h_prev_cache, c_prev, gi, gf, gg, go, zg, c, act_c))
    return outputs, cache


def _layer_backward(d_out: np.ndarray, cache, wx: np.ndarray, wh: np.ndarray):
    """Backprop one layer given d(loss)/d(outputs) of shape (N, T, u)."""
    n, t_steps, u = d_out.shape
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * u)
    dx = np.empty((n, t_steps, wx.shape[0]))
    dh_next = np.zeros((n, u))
    dc_next = np.zeros((n, u))
    for t in reversed(range(t_steps)):
        x_t, h_prev, c_prev, gi, gf, gg, go, zg, c, act_c = cache[t]
        dh = d_out[:, t, :] + dh_next
        do = dh * act_c
        dc = dc_next + dh * go * (c > 0)
        di = dc * gg
        dg = dc * gi
        df = dc * c_prev
        dc_next = dc * gf
        dz = np.concatenate([
            di * gi * (1.0 - gi),
            df * gf * (1.0 - gf),
            dg * (zg > 0),
            do * go * (1.0 - go),
        ], axis=1)
        dwx += x_t.T @ dz
        dwh += h_prev.T @ dz
        db += dz.sum(axis=0)
        dx[:, t, :] = dz @ wx.T
        dh_next = dz @ wh.T
    return dx, dwx, dwh, db


def _forward(parts, n_layers: int, x: np.ndarray):
    current = x
    caches = []
    for i in range(n_layers):
        wx, wh, b = parts[3 * i:3 * i + 3]
        current, cache = _layer_forward(current, wx, wh, b)
        caches.append(cache)
    wd, bd = parts[-2], parts[-1]
    pred = current[:, -1, :] @ wd + bd
    return pred, current, caches


def _loss_grad(theta: np.ndarray, x: np.ndarray, y: np.ndarray, shapes, n_layers: int):
    parts = unflatten_params(theta, shapes)
    pred, last_outputs, caches = _forward(parts, n_layers, x)
    resid = pred - y
    loss = float(np.mean(resid * resid))
    dpred = (2.0 / resid.size) * resid
    wd = parts[-2]
    dwd = last_outputs[:, -1, :].T @ dpred
    dbd = dpred.sum(axis=0)
    d_out = np.zeros_like(last_outputs)
    d_out[:, -1, :] = dpred @ wd.T
    grads = [None] * (3 * n_layers) + [dwd, dbd]
    for i in reversed(range(n_layers)):
        wx, wh, _ = parts[3 * i:3 * i + 3]
        d_out, dwx, dwh, db = _layer_backward(d_out, caches[i], wx, wh)
        grads[3 * i:3 * i + 3] = [dwx, dwh, db]
    return loss, flatten_params(grads)


def lstm_train(data: SupervisedSet, cfg: TrainConfig | None = None,
               units: tuple = DEFAULT_UNITS, seed: int | None = None,
               trained_through: int = -1) -> LstmModel:
    """Fit the stacked LSTM on sequence inputs (``data.sequences()``)."""
    cfg = cfg or TrainConfig()
    x = data.sequences()
    y = data.targets
    if len(data) < 1:
        raise ValidationError("training needs at least one row")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValidationError("training data must be finite")
    init_seed = model_seed(cfg, "lstm").integers(2 ** 63) if seed is None else int(seed)
    arrays = _init_arrays(x.shape[2], units, y.shape[1], init_seed)
    shapes = [a.shape for a in arrays]
    theta0 = flatten_params(arrays)
    n_layers = len(units)
    with single_thread_blas():
        theta, history = adam_minimize(
            lambda t: _loss_grad(t, x, y, shapes, n_layers), theta0,
            steps=cfg.max_iter, lr=cfg.learning_rate)
    parts = unflatten_params(theta, shapes)
    layers = tuple({"wx": parts[3 * i], "wh": parts[3 * i + 1], "b": parts[3 * i + 2]}
                   for i in range(n_layers))
    return LstmModel(layers=layers, wd=parts[-2], bd=parts[-1], k=data.k,
                     input_width=x.shape[2], target_mean=data.target_mean,
                     target_scale=data.target_scale, seed=init_seed,
                     loss_history=tuple(history), trained_through=trained_through)


def lstm_predict(model: LstmModel, sequence: np.ndarray) -> np.ndarray:
    """Forecast in currency units from one (k, input_width) sequence."""
    sequence = np.asarray(sequence, dtype=float)
    if sequence.shape != (model.k, model.input_width):
        raise ShapeError(
            f"sequence shape {sequence.shape} does not match "
            f"({model.k}, {model.input_width})")
    parts = []
    for layer in model.layers:
        parts += [layer["wx"], layer["wh"], layer["b"]]
    parts += [model.wd, model.bd]
    pred, _, _ = _forward(parts, len(model.layers), sequence[None, :, :])
    return pred[0] * model.target_scale + model.target_mean
