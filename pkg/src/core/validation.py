"""Record validation against the configured per-modality dimensions."""

import math
from typing import Mapping

from src.core.errors import (
    DimensionMismatchError,
    EmptyClipError,
    LabelOutOfRangeError,
    NonFiniteInputError,
    ScoreOutOfRangeError,
)
from src.core.types import ClipRecord, Embedding, Modality


def _check_embedding(embedding: Embedding, expected: int | None, where: str) -> None:
    if expected is not None and embedding.dim != expected:
        raise DimensionMismatchError(f"{where}: expected {expected} values, got {embedding.dim}")
    if not embedding.is_finite:
        raise NonFiniteInputError(f"{where}: embedding contains NaN or Inf")


def validate_clip(clip: ClipRecord, dims: Mapping[Modality, int],
                  n_classes: int | None = None) -> None:
    """Raise if the clip violates any type invariant; return None when valid.

    Frame embeddings are checked against dims[FACE]; each clip embedding
    against its own modality. Modalities missing from `dims` are not
    width-checked.
    """
    if not clip.frames and not clip.clip_embeddings:
        raise EmptyClipError(f"clip {clip.clip_id!r}: no frames and no clip embeddings")

    face_dim = dims.get(Modality.FACE)
    for i, frame in enumerate(clip.frames):
        where = f"clip {clip.clip_id!r} frames[{i}]"
        _check_embedding(frame.embedding, face_dim, f"{where}.embedding")
        q = frame.quality_score
        if not math.isfinite(q) or q < 0:
            raise ScoreOutOfRangeError(f"{where}.quality_score={q} must be a finite value >= 0")
        d = frame.detection_score
        if not math.isfinite(d) or not 0.0 <= d <= 1.0:
            raise ScoreOutOfRangeError(f"{where}.detection_score={d} must lie in [0, 1]")

    for modality, embedding in clip.clip_embeddings.items():
        where = f"clip {clip.clip_id!r} clip_embeddings[{Modality(modality).value}]"
        _check_embedding(embedding, dims.get(Modality(modality)), where)

    if clip.label is not None:
        if clip.label < 0 or (n_classes is not None and clip.label >= n_classes):
            raise LabelOutOfRangeError(
                f"clip {clip.clip_id!r}: label {clip.label} outside [0, {n_classes})"
            )
