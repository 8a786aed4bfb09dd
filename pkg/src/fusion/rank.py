"""Decision-level rank fusion.

For each (label, clip) the weighted score is W = sum over the models that
list the clip of result_score / rank_score. Absent models contribute
nothing. Per label, clips are ordered by W descending, clip_id ascending.
"""

import math
from collections import defaultdict
from typing import Iterable, Mapping, Sequence

from src import RETRIEVAL_CUT
from src.core import DuplicateClipError, InvalidRankError, PredictionList, RetrievalResult


def _check_unique(plist: PredictionList) -> None:
    seen: set[str] = set()
    for entry in plist.entries:
        if entry.clip_id in seen:
            raise DuplicateClipError(f"clip {entry.clip_id!r} listed twice for label {plist.label}")
        seen.add(entry.clip_id)


def fuse_label(label: int, lists: Sequence[PredictionList]) -> list[tuple[str, float]]:
    """Fuse every model's list for one label into [(clip_id, W)], best first."""
    terms: dict[str, list[float]] = defaultdict(list)
    for plist in lists:
        _check_unique(plist)
        for entry in plist.entries:
            if entry.rank_score < 1:
                raise InvalidRankError(f"rank_score must be >= 1, got {entry.rank_score} for {entry.clip_id!r}")
            terms[entry.clip_id].append(entry.result_score / entry.rank_score)

    # fsum is exactly rounded, so W does not depend on model order.
    fused = [(clip_id, math.fsum(parts)) for clip_id, parts in terms.items()]
    fused.sort(key=lambda item: (-item[1], item[0]))
    return fused


def fuse_all(predictions: Mapping[str, Mapping[int, PredictionList]],
             labels: Iterable[int] | None = None,
             k: int = RETRIEVAL_CUT) -> RetrievalResult:
    """Apply fuse_label to every label and keep the top k.

    `labels` fixes the label universe; labels that no model predicts map to
    an empty list. Defaults to the union of labels seen in `predictions`.
    """
    if labels is None:
        universe = sorted({lab for per_label in predictions.values() for lab in per_label})
    else:
        universe = sorted(set(labels))

    model_names = sorted(predictions)
    rankings = {}
    for label in universe:
        lists = [predictions[name][label] for name in model_names if label in predictions[name]]
        rankings[label] = fuse_label(label, lists)[:k] if lists else []
    return RetrievalResult(rankings)
