"""MLP Classifier Package"""

from src.mlp.params import MlpParams, PARAM_NAMES, TRAINABLE, RUNNING_STATS
from src.mlp.network import (
    forward,
    forward_pass,
    loss_and_grad,
    predict_top_k,
    top_k_labels,
    softmax,
    BN_EPSILON,
)
from src.mlp.trainer import TrainConfig, MlpTrainer, AdamOptimizer, train, accuracy
from src.mlp.checkpoint import encode, decode, save_checkpoint, load_checkpoint

__all__ = [
    "MlpParams",
    "PARAM_NAMES",
    "TRAINABLE",
    "RUNNING_STATS",
    "forward",
    "forward_pass",
    "loss_and_grad",
    "predict_top_k",
    "top_k_labels",
    "softmax",
    "BN_EPSILON",
    "TrainConfig",
    "MlpTrainer",
    "AdamOptimizer",
    "train",
    "accuracy",
    "encode",
    "decode",
    "save_checkpoint",
    "load_checkpoint",
]
