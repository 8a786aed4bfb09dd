"""Synthetic Corpus Package"""

from src.synth.generator import SynthConfig, generate, generate_training, identity_prototypes

__all__ = ["SynthConfig", "generate", "generate_training", "identity_prototypes"]
