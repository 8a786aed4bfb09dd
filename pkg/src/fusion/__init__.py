"""Rank Fusion Package"""

from src.fusion.rank import fuse_label, fuse_all
from src.fusion.merge import min_max_normalize, merge_results

__all__ = ["fuse_label", "fuse_all", "min_max_normalize", "merge_results"]
