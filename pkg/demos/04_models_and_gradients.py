"""The three forecasters and their verification hooks.

Trains the perceptron and the stacked LSTM on a small supervised task,
verifies both backpropagation implementations against finite differences,
fits the AR baseline, and round-trips a model through its file format.
"""

import tempfile

import numpy as np

from cropcast import SyntheticSpec, generate_synthetic
from cropcast.features import FeatureConfig, build_feature_frame, make_supervised
from cropcast.models import (TrainConfig, ar_fit, ar_predict, gradient_check,
                             load_model, lstm_predict, lstm_train, mlp_predict,
                             mlp_train, save_model)
from cropcast.quality import impute_spline, quality_report

series = generate_synthetic(SyntheticSpec(
    n_days=260, base_price=2000.0, seasonal_amplitude=120.0, seasonal_period=60,
    noise_std=35.0, ar1_coeff=0.5, seed=5))
frame = build_feature_frame(impute_spline(series), quality_report(series),
                            FeatureConfig(k=5, horizon=15))
sup = make_supervised(frame)
print(f"supervised task: {len(sup)} rows, {sup.inputs.shape[1]} inputs, "
      f"{sup.targets.shape[1]}-day targets")

# Perceptron: quasi-Newton, squared error, 10 hidden ReLU units.
mlp = mlp_train(sup, TrainConfig(max_iter=120), seed=1)
print(f"perceptron: initial loss {mlp.loss_history[0]:.4f} -> "
      f"final {mlp.loss_history[-1]:.4f} in {len(mlp.loss_history) - 1} steps "
      f"(converged={mlp.converged})")

# Backprop verification: central finite differences on a tiny batch.
err = gradient_check(mlp, sup.inputs[:6], sup.targets[:6])
print(f"perceptron gradient check: max relative error {err:.2e}")

# Stacked LSTM (small units here; the default is 100+100).
lstm = lstm_train(sup, TrainConfig(max_iter=60), units=(16, 16), seed=2)
err = gradient_check(lstm, sup.sequences()[:4], sup.targets[:4])
print(f"lstm: final loss {lstm.loss_history[-1]:.4f}; "
      f"gradient check {err:.2e}")

# Both predict in currency units.
day = len(frame) - 1
from cropcast.features import input_row, make_sequence_input
print(f"perceptron 15-day forecast head: "
      f"{np.round(mlp_predict(mlp, input_row(frame, day))[:4], 1)}")
print(f"lstm 15-day forecast head:       "
      f"{np.round(lstm_predict(lstm, make_sequence_input(frame, day))[:4], 1)}")

# The univariate baseline: difference if the unit root stands, AR by AIC.
baseline = ar_fit(frame.prices)
print(f"baseline: d={baseline.d}, p={baseline.p}; forecast head "
      f"{np.round(ar_predict(baseline, horizon=15)[:4], 1)}")

# Model files: text manifest + float64 blob, bit-exact reload.
with tempfile.TemporaryDirectory() as tmp:
    save_model(mlp, tmp)
    again = load_model(tmp)
    print(f"file round-trip bit-exact: "
          f"{all(np.array_equal(getattr(mlp, n), getattr(again, n)) for n in ('w1', 'b1', 'w2', 'b2'))}")
