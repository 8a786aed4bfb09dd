"""End-to-end orchestration: route, predict with the model grid, fuse, merge."""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from src import RETRIEVAL_CUT
from src.aggregate import aggregate_band, aggregate_clip
from src.core import ClipRecord, EmptyInputError, Modality, PredictionList, RetrievalResult
from src.fusion import fuse_all, merge_results
from src.mlp import forward
from src.pipeline.ensemble import (
    CONCAT_BASELINES,
    ModelGrid,
    concat_feature,
    ensemble_batch,
    mean_of_sorted,
    modality_feature,
)
from src.pipeline.routing import RoutingConfig, route

logger = logging.getLogger(__name__)

PART_A_MODEL = "part_a"
SINGLE_PREFIX = "single:"
CONCAT_PREFIX = "concat:"


def single_model(modality: Modality) -> str:
    return f"{SINGLE_PREFIX}{modality.value}"


def concat_model(name: str) -> str:
    return f"{CONCAT_PREFIX}{name}"


@dataclass
class Predictions:
    """Every model's per-label top-100 PredictionLists for one gallery.

    Model names: "part_a" (band grid on Part A clips), "face" / "head" /
    "audio" (Part B fold ensembles on Part B clips), "single:<modality>"
    (the same Part B ensembles on every gallery clip) and "concat:<baseline>"
    (feature-concatenation baselines on every gallery clip).
    """
    n_classes: int
    lists: dict[str, dict[int, PredictionList]] = field(default_factory=dict)
    part_a_ids: tuple[str, ...] = ()
    part_b_ids: tuple[str, ...] = ()

    @property
    def models(self) -> list[str]:
        return sorted(self.lists)

    def part_b_lists(self) -> dict[str, dict[int, PredictionList]]:
        return {m.value: self.lists[m.value] for m in Modality if m.value in self.lists}


@dataclass
class FusionOutcome:
    """Fused retrieval plus the rows the metrics report breaks out."""
    fused: RetrievalResult
    part_a: RetrievalResult
    part_b: RetrievalResult
    singles: dict[str, RetrievalResult]
    part_a_ids: tuple[str, ...]
    part_b_ids: tuple[str, ...]
    concats: dict[str, RetrievalResult] = field(default_factory=dict)


def label_lists(clip_ids: Sequence[str], probs: np.ndarray, n_classes: int,
                cut: int = RETRIEVAL_CUT) -> dict[int, PredictionList]:
    """Turn an (n_clips x C) probability matrix into one top-`cut` list per label."""
    if not clip_ids:
        return {}
    return {
        label: PredictionList.from_scores(label, list(zip(clip_ids, probs[:, label].tolist())), cut)
        for label in range(n_classes)
    }


def as_retrieval(lists: Mapping[int, PredictionList], labels: Iterable[int],
                 cut: int = RETRIEVAL_CUT) -> RetrievalResult:
    """A single model's lists read as a retrieval, scored by result_score."""
    rankings = {}
    for label in sorted(set(labels)):
        plist = lists.get(label)
        rankings[label] = [(e.clip_id, e.result_score) for e in plist.entries][:cut] if plist else []
    return RetrievalResult(rankings)


def _prefixed(predictions: Predictions, prefix: str, labels: Iterable[int],
              cut: int) -> dict[str, RetrievalResult]:
    return {
        model[len(prefix):]: as_retrieval(predictions.lists[model], labels, cut)
        for model in predictions.models if model.startswith(prefix)
    }


def fuse_predictions(predictions: Predictions, cut: int = RETRIEVAL_CUT) -> FusionOutcome:
    """Rank-fuse the Part B models, then merge with the Part A retrieval.

    Fusion and the merge always see the full top-100 lists; `cut` only
    truncates the results, so a smaller cut is a prefix of a larger one.
    """
    labels = range(predictions.n_classes)
    part_a = as_retrieval(predictions.lists.get(PART_A_MODEL, {}), labels)
    part_b = fuse_all(predictions.part_b_lists(), labels)
    singles = _prefixed(predictions, SINGLE_PREFIX, labels, cut)
    return FusionOutcome(
        fused=merge_results(part_a, part_b, labels, cut),
        part_a=part_a.truncated(cut),
        part_b=part_b.truncated(cut),
        singles={m.value: singles[m.value] for m in Modality if m.value in singles},
        part_a_ids=predictions.part_a_ids,
        part_b_ids=predictions.part_b_ids,
        concats=_prefixed(predictions, CONCAT_PREFIX, labels, cut),
    )


class FusionPipeline:
    """Applies a trained ModelGrid to a gallery."""

    def __init__(self, grid: ModelGrid, routing: RoutingConfig | None = None, cut: int = RETRIEVAL_CUT):
        if cut < 1:
            raise ValueError(f"cut must be >= 1, got {cut}")
        self.grid = grid
        self.routing = routing or RoutingConfig()
        self.cut = cut

    def part_a_probs(self, clips: Sequence[ClipRecord]) -> np.ndarray:
        """Mean softmax over every (band, fold) model whose band keeps a frame of the clip.

        A clip that no band keeps is scored by the lowest band's models on
        all of its frames.
        """
        grid = self.grid
        if not grid.part_a:
            raise EmptyInputError("model grid has no Part A models")
        outputs: list[list[np.ndarray]] = [[] for _ in clips]
        for band in grid.bands:
            idx, rows = [], []
            for i, clip in enumerate(clips):
                pooled = aggregate_band(clip, band)
                if pooled is not None:
                    idx.append(i)
                    rows.append(pooled.values)
            if not idx:
                continue
            batch = np.vstack(rows)
            for params in grid.band_models(band):
                for i, row in zip(idx, forward(params, batch, "infer")):
                    outputs[i].append(row)

        lowest = grid.band_models(grid.bands[0])
        for i, clip in enumerate(clips):
            if not outputs[i]:
                logger.debug("clip %s: no band keeps a frame, using all frames", clip.clip_id)
                outputs[i] = list(ensemble_batch(lowest, aggregate_clip(clip.frames).values))
        return np.vstack([mean_of_sorted(np.stack(rows)) for rows in outputs])

    def modality_probs(self, clips: Sequence[ClipRecord], modality: Modality) -> tuple[list[str], np.ndarray]:
        """Fold-ensemble probabilities for the clips carrying `modality`."""
        ids, rows = [], []
        for clip in clips:
            feature = modality_feature(clip, modality)
            if feature is not None:
                ids.append(clip.clip_id)
                rows.append(feature.values)
        if not ids:
            return [], np.empty((0, self.grid.n_classes))
        return ids, ensemble_batch(self.grid.modality_models(modality), np.vstack(rows))

    def concat_probs(self, clips: Sequence[ClipRecord], name: str) -> tuple[list[str], np.ndarray]:
        """Fold-ensemble probabilities of one concatenation baseline."""
        dims = self.grid.modality_dims()
        ids, rows = [], []
        for clip in clips:
            feature = concat_feature(clip, CONCAT_BASELINES[name], dims)
            if feature is not None:
                ids.append(clip.clip_id)
                rows.append(feature.values)
        if not ids:
            return [], np.empty((0, self.grid.n_classes))
        return ids, ensemble_batch(self.grid.concat_models(name), np.vstack(rows))

    def predict(self, gallery: Sequence[ClipRecord]) -> Predictions:
        part_a, part_b = route(gallery, self.routing)
        n_classes = self.grid.n_classes
        lists: dict[str, dict[int, PredictionList]] = {}

        if part_a:
            ids = [c.clip_id for c in part_a]
            lists[PART_A_MODEL] = label_lists(ids, self.part_a_probs(part_a), n_classes)
        else:
            lists[PART_A_MODEL] = {}
        for modality in self.grid.modalities:
            lists[modality.value] = label_lists(*self.modality_probs(part_b, modality), n_classes)
            lists[single_model(modality)] = label_lists(*self.modality_probs(gallery, modality), n_classes)
        for name in self.grid.baselines:
            lists[concat_model(name)] = label_lists(*self.concat_probs(gallery, name), n_classes)

        return Predictions(
            n_classes=n_classes,
            lists=lists,
            part_a_ids=tuple(c.clip_id for c in part_a),
            part_b_ids=tuple(c.clip_id for c in part_b),
        )

    def run_detailed(self, gallery: Sequence[ClipRecord]) -> FusionOutcome:
        return fuse_predictions(self.predict(gallery), self.cut)

    def run(self, gallery: Sequence[ClipRecord]) -> RetrievalResult:
        return self.run_detailed(gallery).fused


def run_pipeline(gallery: Sequence[ClipRecord], grid: ModelGrid,
                 config: RoutingConfig | None = None, cut: int = RETRIEVAL_CUT) -> RetrievalResult:
    """Route, predict, fuse and merge; the top `cut` clips per label."""
    return FusionPipeline(grid, config, cut).run(gallery)
