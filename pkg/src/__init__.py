"""
pidfuse

Multi-modal person identification: frame aggregation, MLP classification,
score-based routing, rank fusion and MAP evaluation over pre-extracted
embeddings.
"""

__version__ = "1.0.0"

# Centralized modality names - single source of truth
# Used by: core (Modality enum), storage (file keys), config (flat keys), cli
MODALITIES = ("face", "head", "audio")

# Protocol constants
EMBEDDING_DIM = 512          # width of every extractor's output
RETRIEVAL_CUT = 100          # top-k kept per person ID, before fusion and for MAP
QUALITY_MAX = 200.0          # upper end of the observed quality-score range
