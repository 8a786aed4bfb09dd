"""Line-delimited corpus files.

One JSON object per line, keys sorted, no whitespace:

    {"clip_id":"gal-00003-001","embeddings":{"audio":[...],"head":[...]},
     "frames":[{"detection":0.91,"embedding":[...],"quality":152.3}],"label":3}

A sidecar `<corpus>.manifest.json` declares the format version, the width
of every modality, the class count and the embedding encoding: "text"
(JSON float lists) or "base64" (little-endian float64 bytes).
"""

import base64
import binascii
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from src import EMBEDDING_DIM
from src.core import (
    ClipRecord,
    DimensionMismatchError,
    Embedding,
    FrameObservation,
    IoFailureError,
    MalformedRecordError,
    Modality,
    VersionMismatchError,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
ENCODINGS = ("text", "base64")
MANIFEST_SUFFIX = ".manifest.json"


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def manifest_path(corpus_path: str | Path) -> Path:
    corpus_path = Path(corpus_path)
    return corpus_path.with_name(corpus_path.name + MANIFEST_SUFFIX)


@dataclass
class CorpusManifest:
    """Sidecar metadata of a corpus file."""
    dims: dict[Modality, int] = field(default_factory=lambda: {m: EMBEDDING_DIM for m in Modality})
    n_classes: int = 0
    encoding: str = "text"
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "dims": {m.value: self.dims[m] for m in Modality if m in self.dims},
            "n_classes": self.n_classes,
            "encoding": self.encoding,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusManifest":
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise VersionMismatchError(f"corpus format version {version!r}, expected {FORMAT_VERSION}")
        try:
            dims = {Modality(k): int(v) for k, v in data["dims"].items()}
            encoding = data.get("encoding", "text")
            n_classes = int(data.get("n_classes", 0))
        except (KeyError, ValueError, TypeError, AttributeError) as e:
            raise MalformedRecordError(f"bad corpus manifest: {e}") from e
        if encoding not in ENCODINGS:
            raise MalformedRecordError(f"unknown embedding encoding {encoding!r}")
        return cls(dims=dims, n_classes=n_classes, encoding=encoding)


def iter_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    """(line number, text) for every non-blank line; undecodable bytes are malformed records."""
    with open(path, "rb") as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise MalformedRecordError(f"not UTF-8: {e.reason}", line_number) from e
            if line.strip():
                yield line_number, line


def load_json(path: str | Path):
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedRecordError(f"{path}: {e}") from e


def read_manifest(corpus_path: str | Path) -> CorpusManifest:
    path = manifest_path(corpus_path)
    data = load_json(path)
    if not isinstance(data, dict):
        raise MalformedRecordError(f"{path}: manifest must be a JSON object")
    return CorpusManifest.from_dict(data)


# ----------------------------------------------------------------------------
# Embedding codecs
# ----------------------------------------------------------------------------

def _encode_values(values: np.ndarray, encoding: str):
    if encoding == "base64":
        return base64.b64encode(np.ascontiguousarray(values, dtype="<f8").tobytes()).decode("ascii")
    return values.tolist()


def _decode_values(raw, encoding: str) -> np.ndarray:
    if encoding == "base64":
        if not isinstance(raw, str):
            raise ValueError("expected a base64 string")
        blob = base64.b64decode(raw, validate=True)
        if len(blob) % 8:
            raise ValueError(f"{len(blob)} bytes is not a whole number of float64 values")
        return np.frombuffer(blob, dtype="<f8").astype(np.float64)
    if not isinstance(raw, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise ValueError("expected a list of numbers")
    return np.asarray(raw, dtype=np.float64)


def _check_dim(embedding: Embedding, expected: int | None, where: str) -> None:
    if expected is not None and embedding.dim != expected:
        raise DimensionMismatchError(f"{where}: {embedding.dim} values, expected {expected}")


# ----------------------------------------------------------------------------
# Records
# ----------------------------------------------------------------------------

def encode_clip(clip: ClipRecord, manifest: CorpusManifest) -> str:
    """One canonical corpus line, without the newline."""
    face_dim = manifest.dims.get(Modality.FACE)
    frames = []
    for i, frame in enumerate(clip.frames):
        _check_dim(frame.embedding, face_dim, f"{clip.clip_id} frame {i}")
        frames.append({
            "embedding": _encode_values(frame.embedding.values, manifest.encoding),
            "quality": float(frame.quality_score),
            "detection": float(frame.detection_score),
        })
    embeddings = {}
    for modality, embedding in clip.clip_embeddings.items():
        _check_dim(embedding, manifest.dims.get(modality), f"{clip.clip_id} {modality.value}")
        embeddings[modality.value] = _encode_values(embedding.values, manifest.encoding)
    return dumps_canonical({
        "clip_id": clip.clip_id,
        "label": clip.label,
        "frames": frames,
        "embeddings": embeddings,
    })


def decode_clip(line: str, manifest: CorpusManifest, line_number: int | None = None) -> ClipRecord:
    """Parse one corpus line; every failure becomes MalformedRecordError."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedRecordError(f"invalid JSON: {e.msg}", line_number) from e
    if not isinstance(data, dict):
        raise MalformedRecordError("record must be a JSON object", line_number)

    clip_id = data.get("clip_id")
    if not isinstance(clip_id, str) or not clip_id:
        raise MalformedRecordError("missing or empty clip_id", line_number)
    label = data.get("label")
    if label is not None and (not isinstance(label, int) or isinstance(label, bool)):
        raise MalformedRecordError(f"{clip_id}: label must be an integer or null", line_number)

    def embedding(raw, modality: Modality, where: str) -> Embedding:
        try:
            values = _decode_values(raw, manifest.encoding)
        except (ValueError, binascii.Error) as e:
            raise MalformedRecordError(f"{clip_id} {where}: {e}", line_number) from e
        expected = manifest.dims.get(modality)
        if expected is not None and values.shape[0] != expected:
            raise MalformedRecordError(
                f"{clip_id} {where}: {values.shape[0]} values, expected {expected}", line_number)
        return Embedding(values)

    raw_frames = data.get("frames", [])
    if not isinstance(raw_frames, list):
        raise MalformedRecordError(f"{clip_id}: frames must be a list", line_number)
    frames = []
    for i, raw in enumerate(raw_frames):
        if not isinstance(raw, dict) or not {"embedding", "quality", "detection"} <= raw.keys():
            raise MalformedRecordError(f"{clip_id} frame {i}: needs embedding, quality, detection", line_number)
        try:
            quality, detection = float(raw["quality"]), float(raw["detection"])
        except (TypeError, ValueError) as e:
            raise MalformedRecordError(f"{clip_id} frame {i}: {e}", line_number) from e
        frames.append(FrameObservation(embedding(raw["embedding"], Modality.FACE, f"frame {i}"), quality, detection))

    clip_embeddings = {}
    raw_embeddings = data.get("embeddings", {})
    if not isinstance(raw_embeddings, dict):
        raise MalformedRecordError(f"{clip_id}: embeddings must be an object", line_number)
    for name, raw in raw_embeddings.items():
        try:
            modality = Modality.parse(name)
        except ValueError:
            raise MalformedRecordError(f"{clip_id}: unknown modality {name!r}", line_number) from None
        clip_embeddings[modality] = embedding(raw, modality, name)

    return ClipRecord(clip_id=clip_id, frames=tuple(frames), clip_embeddings=clip_embeddings, label=label)


def infer_manifest(clips: Sequence[ClipRecord], encoding: str = "text", n_classes: int | None = None) -> CorpusManifest:
    """Manifest describing `clips`: the first width seen per modality, and max label + 1."""
    dims: dict[Modality, int] = {}
    for clip in clips:
        if clip.frames and Modality.FACE not in dims:
            dims[Modality.FACE] = clip.frames[0].embedding.dim
        for modality, embedding in clip.clip_embeddings.items():
            dims.setdefault(modality, embedding.dim)
    for modality in Modality:
        dims.setdefault(modality, EMBEDDING_DIM)
    if n_classes is None:
        n_classes = max((clip.label + 1 for clip in clips if clip.is_labeled), default=0)
    return CorpusManifest(dims=dims, n_classes=n_classes, encoding=encoding)


def write_corpus(clips: Iterable[ClipRecord], path: str | Path,
                 manifest: CorpusManifest | None = None) -> Path:
    """Write the corpus and its sidecar manifest. Returns the corpus path."""
    clips = list(clips)
    manifest = manifest or infer_manifest(clips)
    if manifest.encoding not in ENCODINGS:
        raise ValueError(f"encoding must be one of {ENCODINGS}, got {manifest.encoding!r}")
    body = "".join(encode_clip(clip, manifest) + "\n" for clip in clips)

    path = Path(path)
    try:
        path.write_text(body, encoding="utf-8")
        manifest_path(path).write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"could not write corpus {path}: {e}") from e
    logger.info("wrote %d clips to %s (%s)", len(clips), path, manifest.encoding)
    return path


def read_corpus(path: str | Path) -> list[ClipRecord]:
    """Read a corpus file, checking every record against its manifest."""
    return read_corpus_with_manifest(path)[0]


def read_corpus_with_manifest(path: str | Path) -> tuple[list[ClipRecord], CorpusManifest]:
    path = Path(path)
    manifest = read_manifest(path)
    clips = [decode_clip(line, manifest, line_number) for line_number, line in iter_lines(path)]
    logger.info("read %d clips from %s", len(clips), path)
    return clips, manifest
