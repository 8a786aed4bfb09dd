"""Joining the high-score and low-score retrievals into one ranking."""

from typing import Iterable, Sequence

from src import RETRIEVAL_CUT
from src.core import RetrievalResult


def min_max_normalize(items: Sequence[tuple[str, float]]) -> list[tuple[str, float]]:
    """Rescale scores to [0, 1]; a single candidate or a flat list maps to 1.0."""
    if not items:
        return []
    scores = [score for _, score in items]
    low, high = min(scores), max(scores)
    if high == low:
        return [(cid, 1.0) for cid, _ in items]
    span = high - low
    return [(cid, (score - low) / span) for cid, score in items]


def merge_results(first: RetrievalResult, second: RetrievalResult,
                  labels: Iterable[int] | None = None,
                  k: int = RETRIEVAL_CUT) -> RetrievalResult:
    """Per label: min-max normalize each side, concatenate, re-sort, keep k.

    The two sides are expected to rank disjoint clip sets; if a clip does
    appear on both, its better normalized score is kept.
    """
    universe = sorted(set(labels) if labels is not None else set(first.rankings) | set(second.rankings))
    rankings = {}
    for label in universe:
        best: dict[str, float] = {}
        for side in (first, second):
            for cid, score in min_max_normalize(side.rankings.get(label, [])):
                if cid not in best or score > best[cid]:
                    best[cid] = score
        merged = sorted(best.items(), key=lambda item: (-item[1], item[0]))
        rankings[label] = merged[:k]
    return RetrievalResult(rankings)
