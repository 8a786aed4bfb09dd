"""Binary checkpoint codec.

Layout: header (magic, version, input_dim, hidden_dim, n_classes as
little-endian uint32) followed by every tensor in declaration order as
little-endian float32.
"""

import struct
from pathlib import Path

import numpy as np

from src.core import IoFailureError, MalformedRecordError, VersionMismatchError
from src.mlp.params import MlpParams, PARAM_NAMES

MAGIC = b"PIDM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIII")


def _shapes(input_dim: int, hidden_dim: int, n_classes: int) -> dict[str, tuple[int, ...]]:
    template = MlpParams.zeros(input_dim, hidden_dim, n_classes)
    return {name: tensor.shape for name, tensor in template.tensors()}


def encode(params: MlpParams) -> bytes:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, params.input_dim, params.hidden_dim, params.n_classes)
    body = b"".join(np.ascontiguousarray(t, dtype="<f4").tobytes() for _, t in params.tensors())
    return header + body


def decode(blob: bytes) -> MlpParams:
    if len(blob) < _HEADER.size:
        raise MalformedRecordError("checkpoint shorter than its header")
    magic, version, input_dim, hidden_dim, n_classes = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise MalformedRecordError(f"bad checkpoint magic {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"checkpoint version {version}, expected {FORMAT_VERSION}")

    shapes = _shapes(input_dim, hidden_dim, n_classes)
    expected = _HEADER.size + 4 * sum(int(np.prod(s)) for s in shapes.values())
    if len(blob) != expected:
        raise MalformedRecordError(f"checkpoint has {len(blob)} bytes, expected {expected}")

    tensors = {}
    offset = _HEADER.size
    for name in PARAM_NAMES:
        count = int(np.prod(shapes[name]))
        raw = np.frombuffer(blob, dtype="<f4", count=count, offset=offset)
        tensors[name] = raw.astype(np.float64).reshape(shapes[name])
        offset += 4 * count
    return MlpParams(**tensors)


def save_checkpoint(params: MlpParams, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_bytes(encode(params))
    except OSError as e:
        raise IoFailureError(f"could not write checkpoint {path}: {e}") from e
    return path


def load_checkpoint(path: str | Path) -> MlpParams:
    return decode(Path(path).read_bytes())
