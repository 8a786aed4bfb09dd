"""Model grids: training every (band, fold), (modality, fold) and
(baseline, fold) cell, and averaging their softmax outputs."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from src.aggregate import aggregate_band, aggregate_clip
from src.core import (
    ClipRecord,
    DimensionMismatchError,
    Embedding,
    EmptyBandError,
    EmptyInputError,
    EmptyTrainingSetError,
    MissingModalityError,
    Modality,
)
from src.mlp import MlpParams, MlpTrainer, TrainConfig, forward
from src.pipeline.routing import RoutingConfig, fold_splits

logger = logging.getLogger(__name__)

PART_A, PART_B, PART_CONCAT = "A", "B", "C"

# Entropy tags mixed into every derived seed.
_SPLIT_STAGE, _TRAIN_STAGE = 0, 1
_PART_TAGS = {PART_A: 0, PART_B: 1, PART_CONCAT: 2}

# Feature-concatenation baselines: clip features of several modalities side by
# side, one MLP per fold.
CONCAT_BASELINES: dict[str, tuple[Modality, ...]] = {
    "face+head": (Modality.FACE, Modality.HEAD),
    "face+head+audio": (Modality.FACE, Modality.HEAD, Modality.AUDIO),
}


def derive_seed(seed: int, stage: int, part: str, group: int, fold: int) -> int:
    """Stable 32-bit seed for one grid cell, independent of scheduling."""
    entropy = [int(seed) & 0xFFFFFFFF, stage, _PART_TAGS[part], group, fold]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


@dataclass
class ModelGrid:
    """Trained Part A, Part B and concatenation-baseline models.

    part_a is keyed by (band lower bound, fold), part_b by (modality, fold)
    and concat by (baseline name, fold).
    """
    n_classes: int
    part_a: dict[tuple[float, int], MlpParams] = field(default_factory=dict)
    part_b: dict[tuple[Modality, int], MlpParams] = field(default_factory=dict)
    concat: dict[tuple[str, int], MlpParams] = field(default_factory=dict)

    @property
    def bands(self) -> list[float]:
        return sorted({band for band, _ in self.part_a})

    @property
    def modalities(self) -> list[Modality]:
        present = {m for m, _ in self.part_b}
        return [m for m in Modality if m in present]

    @property
    def baselines(self) -> list[str]:
        return sorted({name for name, _ in self.concat})

    def band_models(self, band: float) -> list[MlpParams]:
        return [self.part_a[key] for key in sorted(self.part_a) if key[0] == band]

    def modality_models(self, modality: Modality) -> list[MlpParams]:
        return [self.part_b[key] for key in sorted(self.part_b, key=_modality_key) if key[0] is modality]

    def concat_models(self, name: str) -> list[MlpParams]:
        return [self.concat[key] for key in sorted(self.concat) if key[0] == name]

    def modality_dims(self) -> dict[Modality, int]:
        """Input width of every modality, read off the Part B models."""
        return {m: self.modality_models(m)[0].input_dim for m in self.modalities}

    @property
    def size(self) -> tuple[int, int]:
        return len(self.part_a), len(self.part_b)


def cell_name(group, fold: int) -> str:
    """File-safe model name, e.g. "a-band40-fold0", "b-head-fold3" or "c-face+head-fold1"."""
    if isinstance(group, Modality):
        return f"b-{group.value}-fold{fold}"
    if isinstance(group, str):
        return f"c-{group}-fold{fold}"
    return f"a-band{group:g}-fold{fold}"


def _modality_key(key: tuple[Modality, int]) -> tuple[int, int]:
    return list(Modality).index(key[0]), key[1]


def modality_feature(clip: ClipRecord, modality: Modality) -> Embedding | None:
    """The clip-level embedding used for `modality` in Part B.

    Face falls back to pooling the frames when no clip-level face
    embedding is stored.
    """
    if modality in clip.clip_embeddings:
        return clip.clip_embeddings[modality]
    if modality is Modality.FACE and clip.frames:
        return aggregate_clip(clip.frames)
    return None


def concat_feature(clip: ClipRecord, modalities: Sequence[Modality],
                   dims: Mapping[Modality, int]) -> Embedding | None:
    """Modality features side by side; an absent modality is zero-filled.

    None when the clip carries none of `modalities`.
    """
    parts, present = [], False
    for modality in modalities:
        feature = modality_feature(clip, modality)
        if feature is None:
            parts.append(np.zeros(dims[modality]))
            continue
        if feature.dim != dims[modality]:
            raise DimensionMismatchError(
                f"{clip.clip_id}: {modality.value} feature is {feature.dim}-d, expected {dims[modality]}")
        parts.append(feature.values)
        present = True
    return Embedding(np.concatenate(parts)) if present else None


def feature_dims(clips: Sequence[ClipRecord], modalities: Sequence[Modality]) -> dict[Modality, int]:
    """Width of every modality's feature, taken from the first clip carrying it."""
    dims = {}
    for modality in modalities:
        feature = next((f for f in (modality_feature(c, modality) for c in clips) if f is not None), None)
        if feature is None:
            raise MissingModalityError(f"no clip carries a {modality.value} feature")
        dims[modality] = feature.dim
    return dims


# ----------------------------------------------------------------------------
# Ensembling
# ----------------------------------------------------------------------------

def _check_compatible(models: Sequence[MlpParams], dim: int) -> None:
    if not models:
        raise EmptyInputError("no models to ensemble")
    first = models[0]
    for params in models:
        if params.input_dim != dim:
            raise DimensionMismatchError(f"model expects {params.input_dim}-d input, feature is {dim}-d")
        if params.n_classes != first.n_classes:
            raise DimensionMismatchError(
                f"models disagree on class count ({first.n_classes} vs {params.n_classes})")


def mean_of_sorted(stacked: np.ndarray) -> np.ndarray:
    """Mean over axis 0 after sorting it, so the result ignores model order bit for bit."""
    return np.sort(stacked, axis=0).mean(axis=0)


def ensemble_batch(models: Sequence[MlpParams], features: np.ndarray) -> np.ndarray:
    """(n x C) mean infer-mode probabilities of `models` on each row."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[np.newaxis, :]
    _check_compatible(models, features.shape[1])
    stacked = np.stack([forward(params, features, "infer") for params in models])
    return mean_of_sorted(stacked)


def ensemble_probs(models: Sequence[MlpParams], feature: Embedding | np.ndarray) -> np.ndarray:
    """Arithmetic mean of every model's softmax output for one feature."""
    values = feature.values if isinstance(feature, Embedding) else np.asarray(feature, dtype=np.float64)
    return ensemble_batch(models, values.reshape(1, -1))[0]


# ----------------------------------------------------------------------------
# Grid training
# ----------------------------------------------------------------------------

@dataclass
class _Cell:
    part: str
    group: int
    key: tuple
    features: np.ndarray
    labels: np.ndarray
    config: TrainConfig


def _run_cells(cells: list[_Cell], threads: int) -> dict[tuple, MlpParams]:
    def fit(cell: _Cell) -> MlpParams:
        if cell.features.shape[0] == 0:
            raise EmptyTrainingSetError(f"{cell_name(*cell.key)} has no training examples")
        return MlpTrainer(cell.config).fit(cell.features, cell.labels)

    if threads <= 1 or len(cells) <= 1:
        trained = [fit(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trained = list(pool.map(fit, cells))
    return {cell.key: params for cell, params in zip(cells, trained)}


def _fold_cells(part: str, group: int, name, features: np.ndarray, labels: np.ndarray,
                routing: RoutingConfig, config: TrainConfig) -> list[_Cell]:
    split_rng = np.random.default_rng(derive_seed(config.rng_seed, _SPLIT_STAGE, part, group, 0))
    cells = []
    for fold, idx in enumerate(fold_splits(labels, routing.folds, split_rng)):
        cell_config = replace(config, rng_seed=derive_seed(config.rng_seed, _TRAIN_STAGE, part, group, fold))
        cells.append(_Cell(part, group, (name, fold), features[idx], labels[idx], cell_config))
    return cells


def _labeled(clips: Sequence[ClipRecord]) -> list[ClipRecord]:
    return [clip for clip in clips if clip.is_labeled]


def infer_n_classes(clips: Sequence[ClipRecord], config: TrainConfig) -> int:
    if config.n_classes is not None:
        return config.n_classes
    labels = [clip.label for clip in clips if clip.is_labeled]
    if not labels:
        raise EmptyTrainingSetError("no labeled training clips")
    return max(2, max(labels) + 1)


def _build(clips: Sequence[ClipRecord], featurize: Callable[[ClipRecord], Embedding | None]):
    rows, labels = [], []
    for clip in clips:
        feature = featurize(clip)
        if feature is not None:
            rows.append(feature.values)
            labels.append(clip.label)
    if not rows:
        return np.empty((0, 0)), np.empty(0, dtype=np.int64)
    return np.vstack(rows), np.asarray(labels, dtype=np.int64)


def train_part_a(train_clips: Sequence[ClipRecord], routing: RoutingConfig | None = None,
                 config: TrainConfig | None = None, *,
                 threads: int = 1) -> dict[tuple[float, int], MlpParams]:
    """One MLP per (quality band, fold) on band-filtered frame aggregates."""
    routing = routing or RoutingConfig()
    clips = _labeled(train_clips)
    config = config or TrainConfig()
    config = replace(config, n_classes=infer_n_classes(clips, config))

    cells = []
    for group, band in enumerate(routing.quality_bands):
        features, labels = _build(clips, lambda clip, b=band: aggregate_band(clip, b))
        if labels.shape[0] == 0:
            raise EmptyBandError(f"no training clip keeps a frame at quality >= {band:g}")
        logger.info("band %g: %d of %d training clips keep frames", band, labels.shape[0], len(clips))
        cells.extend(_fold_cells(PART_A, group, band, features, labels, routing, config))
    return _run_cells(cells, threads)


def train_part_b(train_clips: Sequence[ClipRecord], routing: RoutingConfig | None = None,
                 config: TrainConfig | None = None, *, threads: int = 1,
                 modalities: Sequence[Modality] = tuple(Modality)) -> dict[tuple[Modality, int], MlpParams]:
    """One MLP per (modality, fold) on clip-level embeddings."""
    routing = routing or RoutingConfig()
    clips = _labeled(train_clips)
    config = config or TrainConfig()
    config = replace(config, n_classes=infer_n_classes(clips, config))

    cells = []
    for modality in modalities:
        group = list(Modality).index(modality)
        features, labels = _build(clips, lambda clip, m=modality: modality_feature(clip, m))
        if labels.shape[0] == 0:
            raise MissingModalityError(f"no training clip carries a {modality.value} embedding")
        logger.info("%s: %d of %d training clips", modality.value, labels.shape[0], len(clips))
        cells.extend(_fold_cells(PART_B, group, modality, features, labels, routing, config))
    return _run_cells(cells, threads)


def train_concat(train_clips: Sequence[ClipRecord], routing: RoutingConfig | None = None,
                 config: TrainConfig | None = None, *, threads: int = 1,
                 baselines: Mapping[str, Sequence[Modality]] = CONCAT_BASELINES,
                 dims: Mapping[Modality, int] | None = None) -> dict[tuple[str, int], MlpParams]:
    """One MLP per (baseline, fold) on concatenated modality features."""
    routing = routing or RoutingConfig()
    clips = _labeled(train_clips)
    config = config or TrainConfig()
    config = replace(config, n_classes=infer_n_classes(clips, config))
    needed = sorted({m for modalities in baselines.values() for m in modalities}, key=list(Modality).index)
    dims = dict(dims) if dims is not None else feature_dims(clips, needed)

    cells = []
    for group, name in enumerate(sorted(baselines)):
        modalities = baselines[name]
        features, labels = _build(clips, lambda clip, ms=modalities: concat_feature(clip, ms, dims))
        if labels.shape[0] == 0:
            raise MissingModalityError(f"no training clip carries any modality of {name}")
        logger.info("%s: %d-d features from %d training clips", name, features.shape[1], labels.shape[0])
        cells.extend(_fold_cells(PART_CONCAT, group, name, features, labels, routing, config))
    return _run_cells(cells, threads)


def train_grid(train_clips: Sequence[ClipRecord], routing: RoutingConfig | None = None,
               config: TrainConfig | None = None, *, threads: int = 1, concat: bool = False) -> ModelGrid:
    """Train the full Part A and Part B grids with a shared class count.

    With `concat`, the feature-concatenation baselines are trained as well.
    """
    routing = routing or RoutingConfig()
    config = config or TrainConfig()
    config = replace(config, n_classes=infer_n_classes(train_clips, config))
    grid = ModelGrid(
        n_classes=config.n_classes,
        part_a=train_part_a(train_clips, routing, config, threads=threads),
        part_b=train_part_b(train_clips, routing, config, threads=threads),
    )
    if concat:
        grid.concat = train_concat(train_clips, routing, config, threads=threads, dims=grid.modality_dims())
    logger.info("trained grid: %d Part A models, %d Part B models, %d baseline models",
                *grid.size, len(grid.concat))
    return grid
