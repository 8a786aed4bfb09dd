"""Error hierarchy shared by every package."""


class FusionError(Exception):
    """Base for all data errors raised by the toolkit."""
    pass


class DimensionMismatchError(FusionError):
    """Raised when an embedding or matrix has the wrong width."""
    pass


class EmptyClipError(FusionError):
    """Raised when a clip has neither frames nor clip embeddings."""
    pass


class ScoreOutOfRangeError(FusionError):
    """Raised when a quality or detection score, or an audio sample, violates its bounds."""
    pass


class NonFiniteInputError(FusionError):
    """Raised when NaN or Inf reaches a numeric operation."""
    pass


class EmptyFrameListError(FusionError):
    """Raised when aggregation is asked to pool zero frames."""
    pass


class LabelOutOfRangeError(FusionError):
    """Raised when a label falls outside [0, n_classes)."""
    pass


class EmptyTrainingSetError(FusionError):
    """Raised when a trainer receives no examples."""
    pass


class EmptyBandError(FusionError):
    """Raised when a quality band filter leaves no training clips."""
    pass


class MissingModalityError(FusionError):
    """Raised when a modality is absent from every training clip."""
    pass


class DuplicateClipError(FusionError):
    """Raised when a prediction list names the same clip twice."""
    pass


class InvalidRankError(FusionError):
    """Raised when a prediction entry's rank_score is below 1."""
    pass


class DuplicateInRankingError(FusionError):
    """Raised when a ranking handed to AP contains a clip twice."""
    pass


class MissingLabelError(FusionError):
    """Raised when a ground-truth label has no entry in a retrieval result."""
    pass


class TooShortError(FusionError):
    """Raised when a waveform is shorter than one analysis window."""
    pass


class WrongSampleRateError(FusionError):
    """Raised when a waveform is not at the canonical sample rate."""
    pass


class EmptyInputError(FusionError):
    """Raised when a reduction receives an empty matrix."""
    pass


class MalformedRecordError(FusionError):
    """Raised when a line of an input file cannot be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class VersionMismatchError(FusionError):
    """Raised when a file declares a format version we cannot read."""
    pass


class IoFailureError(FusionError):
    """Raised when an output file cannot be written."""
    pass
