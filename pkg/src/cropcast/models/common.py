"""Shared training plumbing: config, init, and parameter flattening."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..seeding import rng_for

SOLVER_QUASI_NEWTON = "quasi_newton"
SOLVER_ADAM = "adam"


@dataclass(frozen=True)
class TrainConfig:
    """Solver settings shared by the trainable models.

    ``tolerance`` is the gradient-norm stopping rule of the quasi-Newton
    solver; ``learning_rate`` applies only to the adam solver.
    """

    solver: str = SOLVER_QUASI_NEWTON
    max_iter: int = 200
    tolerance: float = 1e-6
    learning_rate: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.solver not in (SOLVER_QUASI_NEWTON, SOLVER_ADAM):
            raise ValidationError(f"unknown solver {self.solver!r}")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be positive")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int,
                   shape: tuple) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, x)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def flatten_params(arrays) -> np.ndarray:
    return np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])


def unflatten_params(vector: np.ndarray, shapes) -> list:
    out = []
    pos = 0
    for shape in shapes:
        size = int(np.prod(shape))
        out.append(vector[pos:pos + size].reshape(shape))
        pos += size
    if pos != vector.size:
        raise ValidationError("parameter vector length does not match shapes")
    return out


def adam_minimize(loss_grad, theta0: np.ndarray, steps: int, lr: float,
                  beta1: float = 0.9, beta2: float = 0.999,
                  eps: float = 1e-8) -> tuple[np.ndarray, list]:
    """Full-batch adaptive-moment descent for a fixed number of steps."""
    theta = theta0.copy()
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    history = []
    for t in range(1, steps + 1):
        loss, grad = loss_grad(theta)
        history.append(float(loss))
        m = beta1 * m + (1.0 - beta1) * grad
        v = beta2 * v + (1.0 - beta2) * grad * grad
        mhat = m / (1.0 - beta1 ** t)
        vhat = v / (1.0 - beta2 ** t)
        theta -= lr * mhat / (np.sqrt(vhat) + eps)
    history.append(float(loss_grad(theta)[0]))
    return theta, history


def model_seed(cfg: TrainConfig, *labels) -> np.random.Generator:
    return rng_for(cfg.seed, "model-init", *labels)
