"""Ground truth, prediction, retrieval and report files."""

import json
import logging
from pathlib import Path
from typing import Iterable

from src.core import (
    IoFailureError,
    MalformedRecordError,
    PredictionEntry,
    PredictionList,
    RetrievalResult,
    VersionMismatchError,
)
from src.eval import GroundTruth, MetricsReport
from src.pipeline import Predictions
from src.storage.corpus import FORMAT_VERSION, dumps_canonical, iter_lines, load_json

logger = logging.getLogger(__name__)


def _write(path: str | Path, text: str, what: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"could not write {what} {path}: {e}") from e
    logger.info("wrote %s %s", what, path)
    return path


def _check_version(data: dict, what: str) -> None:
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"{what} format version {version!r}, expected {FORMAT_VERSION}")


# ----------------------------------------------------------------------------
# Ground truth
# ----------------------------------------------------------------------------

def write_truth(truth: GroundTruth, path: str | Path) -> Path:
    data = {
        "format_version": FORMAT_VERSION,
        "positives": {str(label): sorted(truth.positives[label]) for label in truth.labels},
    }
    return _write(path, json.dumps(data, indent=2, sort_keys=True) + "\n", "ground truth")


def read_truth(path: str | Path) -> GroundTruth:
    path = Path(path)
    data = load_json(path)
    if not isinstance(data, dict):
        raise MalformedRecordError(f"{path}: ground truth must be a JSON object")
    _check_version(data, "ground truth")
    try:
        positives = {int(label): frozenset(ids) for label, ids in data["positives"].items()}
    except (KeyError, ValueError, TypeError, AttributeError) as e:
        raise MalformedRecordError(f"{path}: bad positives table: {e}") from e
    return GroundTruth(positives)


# ----------------------------------------------------------------------------
# Retrieval (tab-separated, one line per label)
# ----------------------------------------------------------------------------

def format_retrieval(result: RetrievalResult, labels: Iterable[int] | None = None) -> str:
    universe = sorted(set(result.labels) | set(labels or ()))
    lines = ["\t".join([str(label), *result.ranked_ids(label)]) for label in universe]
    return "".join(line + "\n" for line in lines)


def write_retrieval(result: RetrievalResult, path: str | Path, labels: Iterable[int] | None = None) -> Path:
    """`label<TAB>clip<TAB>clip...` per label in ascending label order.

    `labels` adds lines for labels the result does not mention.
    """
    return _write(path, format_retrieval(result, labels), "retrieval")


def read_retrieval(path: str | Path) -> RetrievalResult:
    """Rankings in file order; the score of rank r is 1/r."""
    path = Path(path)
    rankings = {}
    for line_number, line in iter_lines(path):
        head, *clip_ids = line.rstrip("\r\n").split("\t")
        try:
            label = int(head)
        except ValueError:
            raise MalformedRecordError(f"label {head!r} is not an integer", line_number) from None
        if label in rankings:
            raise MalformedRecordError(f"label {label} listed twice", line_number)
        rankings[label] = [(cid, 1.0 / rank) for rank, cid in enumerate(clip_ids, start=1)]
    return RetrievalResult(rankings)


# ----------------------------------------------------------------------------
# Predictions (JSON lines: header, then one line per model and label)
# ----------------------------------------------------------------------------

def format_predictions(predictions: Predictions) -> str:
    header = {
        "format_version": FORMAT_VERSION,
        "n_classes": predictions.n_classes,
        "models": predictions.models,
        "part_a": list(predictions.part_a_ids),
        "part_b": list(predictions.part_b_ids),
    }
    lines = [dumps_canonical(header)]
    for model in predictions.models:
        for label in sorted(predictions.lists[model]):
            plist = predictions.lists[model][label]
            lines.append(dumps_canonical({
                "model": model,
                "label": label,
                "entries": [[e.clip_id, e.result_score, e.rank_score] for e in plist.entries],
            }))
    return "".join(line + "\n" for line in lines)


def write_predictions(predictions: Predictions, path: str | Path) -> Path:
    return _write(path, format_predictions(predictions), "predictions")


def _parse_list(data: dict, line_number: int) -> tuple[str, PredictionList]:
    try:
        model, label = data["model"], data["label"]
        entries = tuple(PredictionEntry(str(cid), float(score), int(rank)) for cid, score, rank in data["entries"])
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedRecordError(f"bad prediction list: {e}", line_number) from e
    if not isinstance(label, int):
        raise MalformedRecordError(f"label {label!r} is not an integer", line_number)
    return model, PredictionList(label=label, entries=entries)


def read_predictions(path: str | Path) -> Predictions:
    path = Path(path)
    lines = list(iter_lines(path))
    if not lines:
        raise MalformedRecordError(f"{path}: empty predictions file")

    records = []
    for line_number, line in lines:
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedRecordError(f"invalid JSON: {e.msg}", line_number) from e
        if not isinstance(data, dict):
            raise MalformedRecordError("record must be a JSON object", line_number)
        records.append((line_number, data))

    _, header = records[0]
    _check_version(header, "predictions")
    try:
        n_classes = int(header["n_classes"])
        models = [str(m) for m in header["models"]]
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedRecordError(f"bad predictions header: {e}", 1) from e

    lists = {model: {} for model in models}
    for line_number, data in records[1:]:
        model, plist = _parse_list(data, line_number)
        if model not in lists:
            raise MalformedRecordError(f"model {model!r} is not declared in the header", line_number)
        lists[model][plist.label] = plist
    return Predictions(
        n_classes=n_classes,
        lists=lists,
        part_a_ids=tuple(header.get("part_a", ())),
        part_b_ids=tuple(header.get("part_b", ())),
    )


# ----------------------------------------------------------------------------
# Metrics report
# ----------------------------------------------------------------------------

def write_report(report: MetricsReport, path: str | Path) -> Path:
    return _write(path, report.to_json(), "metrics report")


def read_report(path: str | Path) -> MetricsReport:
    path = Path(path)
    data = load_json(path)
    try:
        return MetricsReport.from_dict(data)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise MalformedRecordError(f"{path}: bad metrics report: {e}") from e
