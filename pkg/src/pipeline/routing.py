"""Part A / Part B routing and seeded fold splits."""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.core import ClipRecord

logger = logging.getLogger(__name__)


def _default_bands() -> tuple[float, ...]:
    return (40.0, 60.0, 80.0, 100.0)


@dataclass
class RoutingConfig:
    """Quality bands of the Part A grid, the Part A entry thresholds and the fold count."""
    quality_bands: tuple[float, ...] = field(default_factory=_default_bands)
    part_a_quality_threshold: float = 40.0
    part_a_detection_threshold: float = 0.5
    folds: int = 5

    def __post_init__(self):
        self.quality_bands = tuple(float(b) for b in self.quality_bands)
        if not self.quality_bands:
            raise ValueError("quality_bands must not be empty")
        if any(b < 0 for b in self.quality_bands):
            raise ValueError(f"quality band bounds must be >= 0, got {list(self.quality_bands)}")
        if any(lo >= hi for lo, hi in zip(self.quality_bands, self.quality_bands[1:])):
            raise ValueError(f"quality bands must be strictly increasing, got {list(self.quality_bands)}")
        if self.part_a_quality_threshold < 0 or self.part_a_detection_threshold < 0:
            raise ValueError("routing thresholds must be >= 0")
        if self.folds < 1:
            raise ValueError(f"folds must be >= 1, got {self.folds}")

    @property
    def part_a_models(self) -> int:
        return len(self.quality_bands) * self.folds


def is_high_score(clip: ClipRecord, config: RoutingConfig) -> bool:
    """True if some frame clears both Part A thresholds."""
    return any(
        frame.quality_score >= config.part_a_quality_threshold
        and frame.detection_score >= config.part_a_detection_threshold
        for frame in clip.frames
    )


def route(clips: Sequence[ClipRecord], config: RoutingConfig | None = None) -> tuple[list[ClipRecord], list[ClipRecord]]:
    """Split clips into (Part A, Part B), each keeping input order."""
    config = config or RoutingConfig()
    part_a, part_b = [], []
    for clip in clips:
        (part_a if is_high_score(clip, config) else part_b).append(clip)
    logger.info("routed %d clips: %d to Part A, %d to Part B", len(clips), len(part_a), len(part_b))
    return part_a, part_b


def fold_splits(labels: Sequence[int], folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Training index sets for each fold.

    Examples are dealt round-robin into `folds` splits, label by label in a
    shuffled order, so every split sees each label when it has enough
    examples. Fold j trains on everything outside split j; a single fold
    trains on everything.
    """
    if folds < 1:
        raise ValueError(f"folds must be >= 1, got {folds}")
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    if folds == 1:
        return [np.arange(n)]

    assignment = np.empty(n, dtype=np.int64)
    slot = 0
    for label in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == label))
        assignment[members] = (slot + np.arange(members.shape[0])) % folds
        slot = (slot + members.shape[0]) % folds
    return [np.flatnonzero(assignment != j) for j in range(folds)]
