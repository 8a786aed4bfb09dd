"""Shared factories for building clips and frames in tests."""

import re

import numpy as np
import pytest

from src.core import ClipRecord, Embedding, FrameObservation, Modality

ANSI_RE = re.compile(r'\033\[[0-9;]*m')


@pytest.fixture
def strip_ansi():
    """Return a function that removes ANSI escape codes."""
    def _strip(text: str) -> str:
        return ANSI_RE.sub('', text)
    return _strip


@pytest.fixture
def make_frame():
    """Return a factory: make_frame(values, quality=100, detection=0.9)."""
    def _make(values, quality: float = 100.0, detection: float = 0.9) -> FrameObservation:
        return FrameObservation(Embedding(values), quality, detection)
    return _make


@pytest.fixture
def make_clip(make_frame):
    """Return a factory building a ClipRecord from (values, quality, detection) frame tuples."""
    def _make(clip_id: str = "c0", frames=(), label=None, **embeddings) -> ClipRecord:
        return ClipRecord(
            clip_id=clip_id,
            frames=tuple(make_frame(*f) for f in frames),
            clip_embeddings={Modality(k): Embedding(v) for k, v in embeddings.items()},
            label=label,
        )
    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
