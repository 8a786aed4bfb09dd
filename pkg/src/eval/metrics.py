"""Mean average precision over per-person retrieval lists.

AP_i = (1/m_i) * sum_j j / r_j over the positives found at ranks
r_1 < ... < r_n within the top `cut` results. MAP is the unweighted mean
over every person ID in the ground truth; IDs with an empty result list
score 0. Top-K accuracy is deliberately absent: distractor clips make it
meaningless.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from src import RETRIEVAL_CUT
from src.core import ClipRecord, DuplicateInRankingError, MissingLabelError, RetrievalResult


@dataclass
class GroundTruth:
    """label -> set of positive clip ids."""
    positives: dict[int, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        self.positives = {int(k): frozenset(v) for k, v in self.positives.items()}

    @property
    def labels(self) -> list[int]:
        return sorted(self.positives)

    @property
    def n_labels(self) -> int:
        return len(self.positives)

    def m(self, label: int) -> int:
        return len(self.positives[label])

    @classmethod
    def from_clips(cls, clips: Iterable[ClipRecord]) -> "GroundTruth":
        grouped: dict[int, set[str]] = {}
        for clip in clips:
            if clip.label is not None:
                grouped.setdefault(clip.label, set()).add(clip.clip_id)
        return cls({label: frozenset(ids) for label, ids in grouped.items()})

    def restricted_to(self, clip_ids: Iterable[str]) -> "GroundTruth":
        """Keep only the given clips; labels left without positives are dropped."""
        keep = set(clip_ids)
        narrowed = {label: ids & keep for label, ids in self.positives.items()}
        return GroundTruth({label: ids for label, ids in narrowed.items() if ids})


def _check_no_duplicates(ranked: Sequence[str]) -> None:
    seen: set[str] = set()
    for cid in ranked:
        if cid in seen:
            raise DuplicateInRankingError(f"clip {cid!r} appears twice in one ranking")
        seen.add(cid)


def average_precision(ranked: Sequence[str], positives, m: int | None = None,
                      cut: int = RETRIEVAL_CUT) -> float:
    """AP of one ranking; only the top `cut` results are looked at."""
    _check_no_duplicates(ranked)
    positives = set(positives)
    m = len(positives) if m is None else m
    if m < 1:
        raise ValueError("average precision needs at least one positive (m >= 1)")

    hits = 0
    precisions = []
    for rank, cid in enumerate(ranked[:cut], start=1):
        if cid in positives:
            hits += 1
            precisions.append(hits / rank)
    return math.fsum(precisions) / m


def _per_label(result: RetrievalResult, truth: GroundTruth, cut: int, scorer) -> dict[int, float]:
    scores = {}
    for label in truth.labels:
        if label not in result:
            raise MissingLabelError(f"label {label} has no entry in the retrieval result")
        scores[label] = scorer(result.ranked_ids(label), truth.positives[label], truth.m(label), cut)
    return scores


def per_label_ap(result: RetrievalResult, truth: GroundTruth, cut: int = RETRIEVAL_CUT) -> dict[int, float]:
    return _per_label(result, truth, cut, average_precision)


def mean_average_precision(result: RetrievalResult, truth: GroundTruth, cut: int = RETRIEVAL_CUT) -> float:
    """Unweighted mean of per-label AP over every label in `truth`."""
    if truth.n_labels == 0:
        raise ValueError("ground truth has no labels")
    scores = per_label_ap(result, truth, cut)
    return math.fsum(scores.values()) / truth.n_labels


def _oracle_ap(ranked: Sequence[str], positives, m: int, cut: int) -> float:
    """AP by explicit enumeration of R_j, the shortest prefix holding j positives."""
    _check_no_duplicates(ranked)
    kept = list(ranked[:cut])
    n_found = sum(1 for cid in kept if cid in positives)
    precisions = []
    for j in range(1, n_found + 1):
        length = 0
        while sum(1 for cid in kept[:length] if cid in positives) < j:
            length += 1
        prefix = kept[:length]
        precisions.append(sum(1 for cid in prefix if cid in positives) / len(prefix))
    return math.fsum(precisions) / m


def oracle_map(result: RetrievalResult, truth: GroundTruth, cut: int = RETRIEVAL_CUT) -> float:
    """Independent MAP computation by brute-force prefix counting."""
    if truth.n_labels == 0:
        raise ValueError("ground truth has no labels")
    scores = _per_label(result, truth, cut, _oracle_ap)
    return math.fsum(scores.values()) / truth.n_labels
