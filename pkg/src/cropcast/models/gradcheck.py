"""Finite-difference verification of the hand-written backpropagation."""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from ..seeding import rng_for

MAX_BATCH = 8
DEFAULT_STEP = 1e-5
DEFAULT_SAMPLES = 60


def gradient_check(model, inputs: np.ndarray, targets: np.ndarray,
                   n_samples: int = DEFAULT_SAMPLES, step: float = DEFAULT_STEP,
                   seed: int = 0) -> float:
    """Max relative error between analytic and central finite differences.

    A seeded subsample of parameter coordinates is perturbed by ``step``
    both ways; the relative error uses max(|analytic|, |numeric|, 1e-8) as
    the denominator.  The model must expose ``param_vector``,
    ``with_params`` and ``loss_and_grad`` (both network types do).
    """
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if inputs.shape[0] > MAX_BATCH:
        raise ValidationError(f"gradient check batch must be <= {MAX_BATCH} rows")
    theta = model.param_vector()
    _, analytic = model.loss_and_grad(inputs, targets)
    rng = rng_for(seed, "gradcheck")
    count = min(n_samples, theta.size)
    coords = rng.choice(theta.size, size=count, replace=False)
    worst = 0.0
    for j in coords:
        bumped = theta.copy()
        bumped[j] += step
        f_plus, _ = model.with_params(bumped).loss_and_grad(inputs, targets)
        bumped[j] -= 2.0 * step
        f_minus, _ = model.with_params(bumped).loss_and_grad(inputs, targets)
        numeric = (f_plus - f_minus) / (2.0 * step)
        denom = max(abs(analytic[j]), abs(numeric), 1e-8)
        worst = max(worst, abs(analytic[j] - numeric) / denom)
    return worst
