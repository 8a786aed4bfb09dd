"""Adam training loop for the MLP classifier."""

import logging
from dataclasses import dataclass

import numpy as np

from src.core import DimensionMismatchError, EmptyTrainingSetError
from src.mlp.network import loss_and_grad_with_cache, forward
from src.mlp.params import MlpParams, TRAINABLE

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    """Optimizer and architecture settings for one MLP."""
    learning_rate: float = 0.0008
    batch_size: int = 512
    dropout_keep_prob: float = 0.5
    epochs: int = 30
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    rng_seed: int = 0
    hidden_dim: int = 1024
    n_classes: int | None = None
    bn_momentum: float = 0.9

    def __post_init__(self):
        if not 0.0 < self.dropout_keep_prob <= 1.0:
            raise ValueError(f"dropout_keep_prob must lie in (0, 1], got {self.dropout_keep_prob}")
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1 or self.epochs < 1 or self.hidden_dim < 1:
            raise ValueError("batch_size, epochs and hidden_dim must be positive")
        if self.n_classes is not None and self.n_classes < 2:
            raise ValueError(f"n_classes must be >= 2, got {self.n_classes}")


class AdamOptimizer:
    """Adam with bias correction over the trainable tensors of MlpParams."""

    def __init__(self, params: MlpParams, config: TrainConfig):
        self.config = config
        self.step_count = 0
        self._m = {name: np.zeros_like(getattr(params, name)) for name in TRAINABLE}
        self._v = {name: np.zeros_like(getattr(params, name)) for name in TRAINABLE}

    def step(self, params: MlpParams, grads: MlpParams) -> None:
        cfg = self.config
        self.step_count += 1
        correction1 = 1.0 - cfg.beta1 ** self.step_count
        correction2 = 1.0 - cfg.beta2 ** self.step_count
        for name in TRAINABLE:
            g = getattr(grads, name)
            m = self._m[name] = cfg.beta1 * self._m[name] + (1.0 - cfg.beta1) * g
            v = self._v[name] = cfg.beta2 * self._v[name] + (1.0 - cfg.beta2) * g * g
            update = cfg.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + cfg.epsilon)
            setattr(params, name, getattr(params, name) - update)


def _update_running_stats(params: MlpParams, cache, momentum: float) -> None:
    for layer, mean_name, var_name in ((cache.layer1, "mean1", "var1"), (cache.layer2, "mean2", "var2")):
        setattr(params, mean_name, momentum * getattr(params, mean_name) + (1.0 - momentum) * layer.batch_mean)
        setattr(params, var_name, momentum * getattr(params, var_name) + (1.0 - momentum) * layer.batch_var)


class MlpTrainer:
    """Trains one MLP; per-epoch mean training loss is kept in `loss_history`."""

    def __init__(self, config: TrainConfig | None = None):
        self.config = config or TrainConfig()
        self.loss_history: list[float] = []

    def fit(self, features, labels, initial: MlpParams | None = None) -> MlpParams:
        cfg = self.config
        x = np.asarray(features, dtype=np.float64)
        y = np.asarray(labels, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise EmptyTrainingSetError("no training examples")
        if y.shape != (x.shape[0],):
            raise DimensionMismatchError(f"{x.shape[0]} feature rows but {y.shape} labels")

        n_classes = cfg.n_classes or max(2, int(y.max()) + 1)
        rng = np.random.default_rng(cfg.rng_seed)
        params = initial.copy() if initial is not None else MlpParams.init(
            x.shape[1], cfg.hidden_dim, n_classes, rng)
        optimizer = AdamOptimizer(params, cfg)
        self.loss_history = []

        n = x.shape[0]
        for epoch in range(cfg.epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                loss, grads, cache = loss_and_grad_with_cache(
                    params, x[idx], y[idx], rng=rng, keep_prob=cfg.dropout_keep_prob)
                _update_running_stats(params, cache, cfg.bn_momentum)
                optimizer.step(params, grads)
                total += loss * len(idx)
            self.loss_history.append(total / n)
            logger.debug("epoch %d/%d loss %.5f", epoch + 1, cfg.epochs, self.loss_history[-1])

        logger.info("trained MLP %d->%d->%d->%d on %d examples, final loss %.4f",
                    params.input_dim, params.hidden_dim, params.hidden_dim, params.n_classes,
                    n, self.loss_history[-1])
        return params


def train(features, labels, config: TrainConfig | None = None) -> MlpParams:
    """Train one MLP and return its final parameters."""
    return MlpTrainer(config).fit(features, labels)


def accuracy(params: MlpParams, features, labels) -> float:
    """Infer-mode top-1 accuracy."""
    probs = forward(params, features, "infer")
    return float(np.mean(probs.argmax(axis=1) == np.asarray(labels)))
