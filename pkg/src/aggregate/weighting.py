"""Frame weighting and weighted pooling - one feature per clip.

a_i = quality_i * detection_i, F = sum(f_i * a_i) / sum(a_i).
All arithmetic is float64 regardless of how embeddings were stored.
"""

import math
from typing import Sequence

import numpy as np

from src.core import (
    ClipRecord,
    DimensionMismatchError,
    Embedding,
    EmptyFrameListError,
    FrameObservation,
)


def _stack(frames: Sequence[FrameObservation]) -> tuple[np.ndarray, np.ndarray]:
    """Return (n x dim embedding matrix, raw weights a_i)."""
    if not frames:
        raise EmptyFrameListError("cannot pool an empty frame list")
    dims = {f.embedding.dim for f in frames}
    if len(dims) != 1:
        raise DimensionMismatchError(f"frames disagree on embedding width: {sorted(dims)}")
    matrix = np.stack([f.embedding.values for f in frames]).astype(np.float64)
    raw = np.array([f.weight for f in frames], dtype=np.float64)
    return matrix, raw


def _canonical_order(matrix: np.ndarray, raw: np.ndarray) -> np.ndarray:
    # Sort by (weight, embedding) so accumulation order ignores input order.
    keys = np.column_stack([raw, matrix])
    return np.lexsort(keys.T[::-1])


def _weighted_sum(weights: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    # Row-by-row accumulation, bit-identical for identical row order.
    return (weights[:, np.newaxis] * matrix).sum(axis=0)


def raw_weights(frames: Sequence[FrameObservation]) -> np.ndarray:
    """Unnormalized a_i = quality_score * detection_score."""
    return _stack(frames)[1]


def frame_weights(frames: Sequence[FrameObservation]) -> np.ndarray:
    """Normalized frame weights summing to 1; uniform when every a_i is 0."""
    raw = raw_weights(frames)
    total = math.fsum(raw)
    if total > 0:
        return raw / total
    return np.full(raw.shape[0], 1.0 / raw.shape[0])


def aggregate_clip(frames: Sequence[FrameObservation]) -> Embedding:
    """Weighted average of frame embeddings using raw a_i over sum(a_i)."""
    matrix, raw = _stack(frames)
    order = _canonical_order(matrix, raw)
    matrix, raw = matrix[order], raw[order]

    total = math.fsum(raw)
    if total <= 0:
        raw = np.ones_like(raw)
        total = float(raw.shape[0])
    return Embedding(_weighted_sum(raw, matrix) / total)


def weighted_average(frames: Sequence[FrameObservation]) -> Embedding:
    """Two-step form: normalize the weights first, then take the dot product.

    Algebraically identical to aggregate_clip.
    """
    matrix, raw = _stack(frames)
    order = _canonical_order(matrix, raw)
    weights = frame_weights([frames[i] for i in order])
    return Embedding(_weighted_sum(weights, matrix[order]))


def filter_band(frames: Sequence[FrameObservation], min_quality: float) -> tuple[FrameObservation, ...]:
    """Frames whose quality score reaches the band's lower bound."""
    return tuple(f for f in frames if f.quality_score >= min_quality)


def aggregate_band(clip: ClipRecord, min_quality: float) -> Embedding | None:
    """Pool a clip's frames inside one quality band; None when the band is empty."""
    kept = filter_band(clip.frames, min_quality)
    if not kept:
        return None
    return aggregate_clip(kept)
