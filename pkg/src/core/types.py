"""Domain types shared by every package."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Sequence

import numpy as np

from src import RETRIEVAL_CUT


class Modality(str, Enum):
    """Independent information channel of a clip."""
    FACE = "face"
    HEAD = "head"
    AUDIO = "audio"

    @classmethod
    def parse(cls, name: str) -> "Modality":
        return cls(name.strip().lower())


class Embedding:
    """Fixed-width real feature vector for one frame or clip.

    Stored as a read-only float64 array. Construction does not check
    finiteness; that is validate_clip's job so invalid records stay
    representable.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64).reshape(-1)
        arr.setflags(write=False)
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return int(self._values.shape[0])

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self._values)))

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Embedding(dim={self.dim})"


@dataclass(frozen=True)
class FrameObservation:
    """One video frame: face embedding plus its quality and detection scores."""
    embedding: Embedding
    quality_score: float
    detection_score: float

    @property
    def weight(self) -> float:
        """Raw pooling weight, quality × detection."""
        return float(self.quality_score) * float(self.detection_score)


@dataclass(frozen=True)
class ClipRecord:
    """One video clip. Unknown identities (distractors) have label None."""
    clip_id: str
    frames: tuple[FrameObservation, ...] = ()
    clip_embeddings: Mapping[Modality, Embedding] = field(default_factory=dict)
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "clip_embeddings", dict(self.clip_embeddings))

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def is_labeled(self) -> bool:
        return self.label is not None

    def has_modality(self, modality: Modality) -> bool:
        if modality in self.clip_embeddings:
            return True
        return modality is Modality.FACE and bool(self.frames)

    def max_quality(self) -> float:
        return max((f.quality_score for f in self.frames), default=0.0)


@dataclass(frozen=True)
class PredictionEntry:
    """One ranked clip inside a PredictionList; rank_score is 1-indexed."""
    clip_id: str
    result_score: float
    rank_score: int


@dataclass(frozen=True)
class PredictionList:
    """One model's ranked top-K clips for one label."""
    label: int
    entries: tuple[PredictionEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PredictionEntry]:
        return iter(self.entries)

    @property
    def clip_ids(self) -> list[str]:
        return [e.clip_id for e in self.entries]

    @classmethod
    def from_scores(cls, label: int, scored: Sequence[tuple[str, float]],
                    limit: int = RETRIEVAL_CUT) -> "PredictionList":
        """Rank (clip_id, score) pairs by score descending, clip_id ascending, keep `limit`."""
        ordered = sorted(scored, key=lambda item: (-item[1], item[0]))[:limit]
        entries = tuple(
            PredictionEntry(clip_id=cid, result_score=float(score), rank_score=rank)
            for rank, (cid, score) in enumerate(ordered, start=1)
        )
        return cls(label=label, entries=entries)


@dataclass
class RetrievalResult:
    """Final per-label rankings: label -> [(clip_id, weighted score)], best first."""
    rankings: dict[int, list[tuple[str, float]]] = field(default_factory=dict)

    @property
    def labels(self) -> list[int]:
        return sorted(self.rankings)

    def __getitem__(self, label: int) -> list[tuple[str, float]]:
        return self.rankings[label]

    def __contains__(self, label: int) -> bool:
        return label in self.rankings

    def ranked_ids(self, label: int) -> list[str]:
        return [cid for cid, _ in self.rankings.get(label, [])]

    def truncated(self, k: int) -> "RetrievalResult":
        return RetrievalResult({lab: list(items[:k]) for lab, items in self.rankings.items()})
