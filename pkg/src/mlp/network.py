"""Forward and backward passes of the 3-layer MLP.

Layer order: FC1 -> BN1 -> ReLU -> Dropout -> FC2 -> BN2 -> ReLU -> Dropout
-> FC3 -> softmax. Dropout is inverted (kept units divided by keep_prob);
in infer mode it is the identity and BN uses running statistics.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.core import DimensionMismatchError, Embedding, LabelOutOfRangeError, NonFiniteInputError
from src.mlp.params import MlpParams

Mode = Literal["train", "infer"]

BN_EPSILON = 1e-5
DEFAULT_KEEP_PROB = 0.5


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


@dataclass
class _Layer:
    """Intermediates of one FC -> BN -> ReLU -> Dropout block."""
    inputs: np.ndarray
    xhat: np.ndarray
    inv_std: np.ndarray
    pre_relu: np.ndarray
    mask: np.ndarray | None
    output: np.ndarray
    batch_mean: np.ndarray | None = None
    batch_var: np.ndarray | None = None


@dataclass
class ForwardCache:
    layer1: _Layer
    layer2: _Layer
    logits: np.ndarray
    probs: np.ndarray


def _as_batch(params: MlpParams, batch) -> np.ndarray:
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[0] < 1:
        raise DimensionMismatchError(f"expected a non-empty B x {params.input_dim} batch, got shape {x.shape}")
    if x.shape[1] != params.input_dim:
        raise DimensionMismatchError(f"batch width {x.shape[1]} does not match input dim {params.input_dim}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("batch contains NaN or Inf")
    return x


def _dropout_mask(shape, keep_prob: float, rng: np.random.Generator) -> np.ndarray | None:
    if keep_prob >= 1.0:
        return None
    return (rng.random(shape) < keep_prob) / keep_prob


def _block(inputs, w, b, gamma, beta, mean, var, train, keep_prob, rng, mask) -> _Layer:
    z = inputs @ w + b
    if train:
        batch_mean = z.mean(axis=0)
        batch_var = z.var(axis=0)
        inv_std = 1.0 / np.sqrt(batch_var + BN_EPSILON)
        xhat = (z - batch_mean) * inv_std
    else:
        batch_mean = batch_var = None
        inv_std = 1.0 / np.sqrt(var + BN_EPSILON)
        xhat = (z - mean) * inv_std
    pre_relu = gamma * xhat + beta
    activated = np.maximum(pre_relu, 0.0)

    if train and mask is None:
        mask = _dropout_mask(activated.shape, keep_prob, rng)
    if not train:
        mask = None
    output = activated * mask if mask is not None else activated
    return _Layer(inputs, xhat, inv_std, pre_relu, mask, output, batch_mean, batch_var)


def forward_pass(params: MlpParams, batch, mode: Mode = "infer", *,
                 rng: np.random.Generator | None = None,
                 keep_prob: float = DEFAULT_KEEP_PROB,
                 masks: tuple[np.ndarray | None, np.ndarray | None] | None = None) -> ForwardCache:
    """Run the network and keep every intermediate needed by backprop.

    `masks` freezes the dropout masks (used by gradient checks); otherwise
    train mode draws them from `rng`.
    """
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    x = _as_batch(params, batch)
    train = mode == "train"
    if train and rng is None:
        rng = np.random.default_rng(0)
    mask1, mask2 = masks if masks is not None else (None, None)

    layer1 = _block(x, params.w1, params.b1, params.gamma1, params.beta1,
                    params.mean1, params.var1, train, keep_prob, rng, mask1)
    layer2 = _block(layer1.output, params.w2, params.b2, params.gamma2, params.beta2,
                    params.mean2, params.var2, train, keep_prob, rng, mask2)
    logits = layer2.output @ params.w3 + params.b3
    return ForwardCache(layer1, layer2, logits, softmax(logits))


def forward(params: MlpParams, batch, mode: Mode = "infer", *,
            rng: np.random.Generator | None = None,
            keep_prob: float = DEFAULT_KEEP_PROB) -> np.ndarray:
    """Class probabilities, one row per input row."""
    return forward_pass(params, batch, mode, rng=rng, keep_prob=keep_prob).probs


def _check_labels(labels, batch_size: int, n_classes: int) -> np.ndarray:
    y = np.asarray(labels)
    if y.shape != (batch_size,):
        raise DimensionMismatchError(f"expected {batch_size} labels, got shape {y.shape}")
    y = y.astype(np.int64)
    if np.any(y < 0) or np.any(y >= n_classes):
        bad = int(y[(y < 0) | (y >= n_classes)][0])
        raise LabelOutOfRangeError(f"label {bad} outside [0, {n_classes})")
    return y


def _block_backward(grad_out: np.ndarray, layer: _Layer, w: np.ndarray, gamma: np.ndarray):
    """Backprop through Dropout -> ReLU -> BN -> FC; returns (d_inputs, dw, db, dgamma, dbeta)."""
    n = grad_out.shape[0]
    if layer.mask is not None:
        grad_out = grad_out * layer.mask
    d_pre = grad_out * (layer.pre_relu > 0)
    dgamma = (d_pre * layer.xhat).sum(axis=0)
    dbeta = d_pre.sum(axis=0)
    dxhat = d_pre * gamma
    dz = (layer.inv_std / n) * (
        n * dxhat - dxhat.sum(axis=0) - layer.xhat * (dxhat * layer.xhat).sum(axis=0)
    )
    dw = layer.inputs.T @ dz
    db = dz.sum(axis=0)
    return dz @ w.T, dw, db, dgamma, dbeta


def loss_and_grad_with_cache(params: MlpParams, batch, labels, *,
                             rng: np.random.Generator | None = None,
                             keep_prob: float = DEFAULT_KEEP_PROB,
                             masks=None) -> tuple[float, MlpParams, ForwardCache]:
    cache = forward_pass(params, batch, "train", rng=rng, keep_prob=keep_prob, masks=masks)
    n = cache.logits.shape[0]
    y = _check_labels(labels, n, params.n_classes)

    logp = log_softmax(cache.logits)
    loss = float(-logp[np.arange(n), y].mean())

    grads = params.zeros_like()
    dlogits = cache.probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    grads.w3 = cache.layer2.output.T @ dlogits
    grads.b3 = dlogits.sum(axis=0)

    d_hidden2 = dlogits @ params.w3.T
    d_hidden1, grads.w2, grads.b2, grads.gamma2, grads.beta2 = _block_backward(
        d_hidden2, cache.layer2, params.w2, params.gamma2)
    _, grads.w1, grads.b1, grads.gamma1, grads.beta1 = _block_backward(
        d_hidden1, cache.layer1, params.w1, params.gamma1)
    return loss, grads, cache


def loss_and_grad(params: MlpParams, batch, labels, *,
                  rng: np.random.Generator | None = None,
                  keep_prob: float = DEFAULT_KEEP_PROB,
                  masks=None) -> tuple[float, MlpParams]:
    """Mean cross-entropy over the batch and its exact gradient.

    The gradient is for the train-mode graph (batch BN statistics) with the
    realized dropout mask.
    """
    loss, grads, _ = loss_and_grad_with_cache(params, batch, labels, rng=rng,
                                              keep_prob=keep_prob, masks=masks)
    return loss, grads


def top_k_labels(probs: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries; ties go to the lower index."""
    return np.argsort(-probs, kind="stable")[:k]


def predict_top_k(params: MlpParams, feature: Embedding | np.ndarray, k: int) -> list[tuple[int, float]]:
    """The k most probable labels for one feature with their probabilities."""
    if not 1 <= k <= params.n_classes:
        raise ValueError(f"k must lie in [1, {params.n_classes}], got {k}")
    values = feature.values if isinstance(feature, Embedding) else feature
    probs = forward(params, values, "infer")[0]
    return [(int(label), float(probs[label])) for label in top_k_labels(probs, k)]
