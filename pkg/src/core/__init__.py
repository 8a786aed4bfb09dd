"""Core Domain Package"""

from src.core.errors import (
    FusionError,
    DimensionMismatchError,
    EmptyClipError,
    ScoreOutOfRangeError,
    NonFiniteInputError,
    EmptyFrameListError,
    LabelOutOfRangeError,
    EmptyTrainingSetError,
    EmptyBandError,
    MissingModalityError,
    DuplicateClipError,
    InvalidRankError,
    DuplicateInRankingError,
    MissingLabelError,
    TooShortError,
    WrongSampleRateError,
    EmptyInputError,
    MalformedRecordError,
    VersionMismatchError,
    IoFailureError,
)
from src.core.types import (
    Modality,
    Embedding,
    FrameObservation,
    ClipRecord,
    PredictionEntry,
    PredictionList,
    RetrievalResult,
)
from src.core.validation import validate_clip

__all__ = [
    "Modality",
    "Embedding",
    "FrameObservation",
    "ClipRecord",
    "PredictionEntry",
    "PredictionList",
    "RetrievalResult",
    "validate_clip",
    "FusionError",
    "DimensionMismatchError",
    "EmptyClipError",
    "ScoreOutOfRangeError",
    "NonFiniteInputError",
    "EmptyFrameListError",
    "LabelOutOfRangeError",
    "EmptyTrainingSetError",
    "EmptyBandError",
    "MissingModalityError",
    "DuplicateClipError",
    "InvalidRankError",
    "DuplicateInRankingError",
    "MissingLabelError",
    "TooShortError",
    "WrongSampleRateError",
    "EmptyInputError",
    "MalformedRecordError",
    "VersionMismatchError",
    "IoFailureError",
]
