"""Retrieval Evaluation Package"""

from src.eval.metrics import (
    GroundTruth,
    average_precision,
    per_label_ap,
    mean_average_precision,
    oracle_map,
)
from src.eval.report import MetricsReport, build_report

__all__ = [
    "GroundTruth",
    "average_precision",
    "per_label_ap",
    "mean_average_precision",
    "oracle_map",
    "MetricsReport",
    "build_report",
]
