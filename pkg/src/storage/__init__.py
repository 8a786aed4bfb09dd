"""File Formats Package"""

from src.storage.corpus import (
    CorpusManifest,
    FORMAT_VERSION,
    ENCODINGS,
    manifest_path,
    read_manifest,
    infer_manifest,
    encode_clip,
    decode_clip,
    write_corpus,
    read_corpus,
    read_corpus_with_manifest,
)
from src.storage.results import (
    write_truth,
    read_truth,
    format_retrieval,
    write_retrieval,
    read_retrieval,
    format_predictions,
    write_predictions,
    read_predictions,
    write_report,
    read_report,
)
from src.storage.models import grid_manifest, save_grid, read_grid_manifest, load_grid

__all__ = [
    "CorpusManifest",
    "FORMAT_VERSION",
    "ENCODINGS",
    "manifest_path",
    "read_manifest",
    "infer_manifest",
    "encode_clip",
    "decode_clip",
    "write_corpus",
    "read_corpus",
    "read_corpus_with_manifest",
    "write_truth",
    "read_truth",
    "format_retrieval",
    "write_retrieval",
    "read_retrieval",
    "format_predictions",
    "write_predictions",
    "read_predictions",
    "write_report",
    "read_report",
    "grid_manifest",
    "save_grid",
    "read_grid_manifest",
    "load_grid",
]
