"""Machine-readable metrics report."""

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from src import RETRIEVAL_CUT
from src.core import RetrievalResult
from src.eval.metrics import GroundTruth, mean_average_precision, per_label_ap


@dataclass
class MetricsReport:
    """MAP of the fused retrieval plus optional per-part, per-modality and baseline rows."""
    map: float
    cut: int
    n_labels: int
    per_label_ap: dict[int, float]
    parts: dict[str, float] = field(default_factory=dict)
    modalities: dict[str, float] = field(default_factory=dict)
    baselines: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "map": self.map,
            "cut": self.cut,
            "n_labels": self.n_labels,
            "per_label_ap": {str(k): v for k, v in sorted(self.per_label_ap.items())},
            "parts": dict(sorted(self.parts.items())),
            "modalities": dict(sorted(self.modalities.items())),
            "baselines": dict(sorted(self.baselines.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        return cls(
            map=float(data["map"]),
            cut=int(data["cut"]),
            n_labels=int(data["n_labels"]),
            per_label_ap={int(k): float(v) for k, v in data["per_label_ap"].items()},
            parts={k: float(v) for k, v in data.get("parts", {}).items()},
            modalities={k: float(v) for k, v in data.get("modalities", {}).items()},
            baselines={k: float(v) for k, v in data.get("baselines", {}).items()},
        )


def build_report(result: RetrievalResult, truth: GroundTruth, cut: int = RETRIEVAL_CUT,
                 parts: Mapping[str, tuple[RetrievalResult, Iterable[str]]] | None = None,
                 modalities: Mapping[str, RetrievalResult] | None = None,
                 baselines: Mapping[str, RetrievalResult] | None = None) -> MetricsReport:
    """Evaluate the fused result and any breakdown rows.

    `parts` maps a part name to (its retrieval, the clip ids routed to it);
    each part is scored against the ground truth restricted to its clips.
    `modalities` and `baselines` are scored against the full ground truth.
    """
    part_maps = {}
    for name, (part_result, clip_ids) in (parts or {}).items():
        narrowed = truth.restricted_to(clip_ids)
        if narrowed.n_labels:
            part_maps[name] = mean_average_precision(part_result, narrowed, cut)

    def score_all(rows: Mapping[str, RetrievalResult] | None) -> dict[str, float]:
        return {name: mean_average_precision(row, truth, cut) for name, row in (rows or {}).items()}

    return MetricsReport(
        map=mean_average_precision(result, truth, cut),
        cut=cut,
        n_labels=truth.n_labels,
        per_label_ap=per_label_ap(result, truth, cut),
        parts=part_maps,
        modalities=score_all(modalities),
        baselines=score_all(baselines),
    )
