"""Trainable regressors: perceptron, stacked LSTM, and the AR baseline."""

from .baseline import ArBaseline, ar_fit, ar_predict
from .common import SOLVER_ADAM, SOLVER_QUASI_NEWTON, TrainConfig
from .gradcheck import gradient_check
from .lstm import LstmModel, lstm_predict, lstm_train
from .mlp import MlpModel, mlp_predict, mlp_train
from .persist import load_extras, load_model, save_model

__all__ = [
    "ArBaseline", "ar_fit", "ar_predict",
    "SOLVER_ADAM", "SOLVER_QUASI_NEWTON", "TrainConfig",
    "gradient_check",
    "LstmModel", "lstm_predict", "lstm_train",
    "MlpModel", "mlp_predict", "mlp_train",
    "load_extras", "load_model", "save_model",
]
