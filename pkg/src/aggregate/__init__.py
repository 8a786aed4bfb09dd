"""Frame Aggregation Package"""

from src.aggregate.weighting import (
    raw_weights,
    frame_weights,
    aggregate_clip,
    weighted_average,
    filter_band,
    aggregate_band,
)

__all__ = [
    "raw_weights",
    "frame_weights",
    "aggregate_clip",
    "weighted_average",
    "filter_band",
    "aggregate_band",
]
