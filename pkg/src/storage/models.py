"""Model-grid directories: one checkpoint per cell plus manifest.json."""

import json
import logging
from pathlib import Path

from src.core import IoFailureError, MalformedRecordError, Modality, VersionMismatchError
from src.mlp import load_checkpoint, save_checkpoint
from src.pipeline import CONCAT_BASELINES, PART_A, PART_B, PART_CONCAT, ModelGrid, RoutingConfig, cell_name
from src.storage.corpus import FORMAT_VERSION, load_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def grid_manifest(grid: ModelGrid, routing: RoutingConfig | None = None) -> dict:
    """Inspectable description of every model in the grid."""
    entries = []
    for (band, fold) in sorted(grid.part_a):
        entries.append({"part": PART_A, "band": band, "fold": fold, "file": cell_name(band, fold) + ".bin"})
    for modality in grid.modalities:
        folds = sorted(fold for m, fold in grid.part_b if m is modality)
        for fold in folds:
            entries.append({"part": PART_B, "modality": modality.value, "fold": fold,
                            "file": cell_name(modality, fold) + ".bin"})
    for (name, fold) in sorted(grid.concat):
        entries.append({"part": PART_CONCAT, "baseline": name, "fold": fold,
                        "file": cell_name(name, fold) + ".bin"})

    any_model = next(iter(grid.part_a.values()), None) or next(iter(grid.part_b.values()), None)
    input_dims = {}
    if grid.part_a:
        input_dims["part_a"] = next(iter(grid.part_a.values())).input_dim
    for modality in grid.modalities:
        input_dims[modality.value] = grid.modality_models(modality)[0].input_dim
    for name in grid.baselines:
        input_dims[f"concat:{name}"] = grid.concat_models(name)[0].input_dim

    manifest = {
        "format_version": FORMAT_VERSION,
        "n_classes": grid.n_classes,
        "hidden_dim": any_model.hidden_dim if any_model is not None else None,
        "input_dims": input_dims,
        "counts": {"part_a": len(grid.part_a), "part_b": len(grid.part_b), "concat": len(grid.concat)},
        "models": entries,
    }
    if routing is not None:
        manifest["quality_bands"] = list(routing.quality_bands)
        manifest["folds"] = routing.folds
    return manifest


def save_grid(grid: ModelGrid, directory: str | Path, routing: RoutingConfig | None = None) -> Path:
    """Write every checkpoint and the manifest into `directory` (created if needed)."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailureError(f"could not create model directory {directory}: {e}") from e

    manifest = grid_manifest(grid, routing)
    for (band, fold), params in grid.part_a.items():
        save_checkpoint(params, directory / (cell_name(band, fold) + ".bin"))
    for (modality, fold), params in grid.part_b.items():
        save_checkpoint(params, directory / (cell_name(modality, fold) + ".bin"))
    for (name, fold), params in grid.concat.items():
        save_checkpoint(params, directory / (cell_name(name, fold) + ".bin"))
    try:
        (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                               encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"could not write {directory / MANIFEST_NAME}: {e}") from e
    logger.info("saved %d Part A, %d Part B and %d baseline models to %s",
                *grid.size, len(grid.concat), directory)
    return directory


def read_grid_manifest(directory: str | Path) -> dict:
    path = Path(directory) / MANIFEST_NAME
    manifest = load_json(path)
    if not isinstance(manifest, dict):
        raise MalformedRecordError(f"{path}: manifest must be a JSON object")
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"model grid format version {version!r}, expected {FORMAT_VERSION}")
    return manifest


def load_grid(directory: str | Path) -> ModelGrid:
    directory = Path(directory)
    manifest = read_grid_manifest(directory)
    grid = ModelGrid(n_classes=int(manifest["n_classes"]))
    for entry in manifest.get("models", []):
        try:
            params = load_checkpoint(directory / entry["file"])
            if entry["part"] == PART_A:
                grid.part_a[(float(entry["band"]), int(entry["fold"]))] = params
            elif entry["part"] == PART_B:
                grid.part_b[(Modality.parse(entry["modality"]), int(entry["fold"]))] = params
            elif entry["part"] == PART_CONCAT:
                if entry["baseline"] not in CONCAT_BASELINES:
                    raise MalformedRecordError(f"unknown baseline {entry['baseline']!r}")
                grid.concat[(entry["baseline"], int(entry["fold"]))] = params
            else:
                raise MalformedRecordError(f"unknown part {entry['part']!r} in {directory / MANIFEST_NAME}")
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedRecordError(f"bad model entry {entry!r}: {e}") from e
    logger.info("loaded %d Part A, %d Part B and %d baseline models from %s",
                *grid.size, len(grid.concat), directory)
    return grid
