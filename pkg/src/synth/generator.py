"""Seeded synthetic corpora standing in for the deep feature extractors.

Each identity owns one unit-norm prototype per modality. Frame (face) and
clip (head, audio) embeddings are prototype + Gaussian noise. Face noise
grows as quality drops:

    sd = modality_noise * (1 + quality_noise_coupling * (1 - q / 200))

The per-coordinate std-dev is sd * sqrt(noise_reference_dim / dim), so the
expected noise energy, and with it the difficulty of a corpus, does not
depend on the embedding width. At dim == noise_reference_dim the scale is 1.

Prototypes, gallery clips and training clips are drawn from independent
child streams of one seed, so generate() and generate_training() agree on
the identities.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from src import QUALITY_MAX
from src.core import ClipRecord, Embedding, FrameObservation, Modality
from src.eval import GroundTruth

logger = logging.getLogger(__name__)

_PROTOTYPE_STREAM, _GALLERY_STREAM, _TRAINING_STREAM = range(3)


def _default_noise() -> dict[Modality, float]:
    return {Modality.FACE: 0.2, Modality.HEAD: 0.6, Modality.AUDIO: 1.2}


def _default_dropout() -> dict[Modality, float]:
    return {Modality.FACE: 0.15, Modality.HEAD: 0.1, Modality.AUDIO: 0.1}


@dataclass
class SynthConfig:
    """Corpus shape and difficulty knobs."""
    n_identities: int = 50
    n_clips_per_identity: int = 10
    n_train_clips_per_identity: int = 20
    n_distractor_clips: int = 100
    dim: int = 64
    noise_reference_dim: int = 16
    frames_per_clip: tuple[int, int] = (3, 12)
    modality_noise: dict[Modality, float] = field(default_factory=_default_noise)
    modality_dropout: dict[Modality, float] = field(default_factory=_default_dropout)
    quality_noise_coupling: float = 1.0
    quality_jitter: float = 20.0
    detection_noise: float = 0.05
    seed: int = 7

    def __post_init__(self):
        self.modality_noise = {Modality(k): float(v) for k, v in self.modality_noise.items()}
        self.modality_dropout = {Modality(k): float(v) for k, v in self.modality_dropout.items()}
        if any(v < 0 for v in self.modality_noise.values()):
            raise ValueError("modality noise std-devs must be >= 0")
        if any(not 0.0 <= v <= 1.0 for v in self.modality_dropout.values()):
            raise ValueError("modality dropout probabilities must lie in [0, 1]")
        if self.quality_noise_coupling < 0:
            raise ValueError("quality_noise_coupling must be >= 0")
        low, high = self.frames_per_clip
        if not 1 <= low <= high:
            raise ValueError(f"frames_per_clip must satisfy 1 <= min <= max, got {self.frames_per_clip}")
        if self.n_identities < 1 or self.dim < 1 or self.noise_reference_dim < 1:
            raise ValueError("n_identities, dim and noise_reference_dim must be positive")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    def noise(self, modality: Modality) -> float:
        return self.modality_noise.get(modality, 0.0)

    def dropout(self, modality: Modality) -> float:
        return self.modality_dropout.get(modality, 0.0)

    @property
    def noise_scale(self) -> float:
        """Per-coordinate multiplier applied to every noise std-dev."""
        return float(np.sqrt(self.noise_reference_dim / self.dim))

    @property
    def dims(self) -> dict[Modality, int]:
        return {m: self.dim for m in Modality}


def _streams(seed: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]


def _unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    rows = rng.standard_normal((n, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def _prototypes(config: SynthConfig, rng: np.random.Generator) -> dict[Modality, np.ndarray]:
    return {m: _unit_rows(rng, config.n_identities, config.dim) for m in Modality}


class _ClipFactory:
    """Draws clips around given prototypes from one stream."""

    def __init__(self, config: SynthConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng

    def _present(self) -> dict[Modality, bool]:
        present = {m: bool(self.rng.random() >= self.config.dropout(m)) for m in Modality}
        if not any(present.values()):
            present[Modality.AUDIO] = True
        return present

    def _frames(self, prototype: np.ndarray) -> tuple[FrameObservation, ...]:
        cfg, rng = self.config, self.rng
        low, high = cfg.frames_per_clip
        n = int(rng.integers(low, high + 1))
        base = rng.uniform(0.0, QUALITY_MAX)
        quality = np.clip(base + rng.uniform(-cfg.quality_jitter, cfg.quality_jitter, n), 0.0, QUALITY_MAX)
        detection = np.clip(0.25 + 0.75 * quality / QUALITY_MAX + rng.normal(0.0, cfg.detection_noise, n), 0.0, 1.0)
        coupling = 1.0 + cfg.quality_noise_coupling * (1.0 - quality / QUALITY_MAX)
        sd = cfg.noise(Modality.FACE) * cfg.noise_scale * coupling
        noise = rng.standard_normal((n, cfg.dim)) * sd[:, np.newaxis]
        return tuple(
            FrameObservation(Embedding(prototype + noise[i]), float(quality[i]), float(detection[i]))
            for i in range(n)
        )

    def clip(self, clip_id: str, prototypes: dict[Modality, np.ndarray], label: int | None) -> ClipRecord:
        present = self._present()
        frames = self._frames(prototypes[Modality.FACE]) if present[Modality.FACE] else ()
        embeddings = {}
        for modality in (Modality.HEAD, Modality.AUDIO):
            if present[modality]:
                sd = self.config.noise(modality) * self.config.noise_scale
                noise = self.rng.standard_normal(self.config.dim) * sd
                embeddings[modality] = Embedding(prototypes[modality] + noise)
        return ClipRecord(clip_id=clip_id, frames=frames, clip_embeddings=embeddings, label=label)


def _identity_protos(protos: dict[Modality, np.ndarray], identity: int) -> dict[Modality, np.ndarray]:
    return {m: protos[m][identity] for m in Modality}


def generate(config: SynthConfig | None = None) -> tuple[list[ClipRecord], GroundTruth]:
    """Gallery corpus: labeled clips for every identity plus unlabeled distractors."""
    config = config or SynthConfig()
    streams = _streams(config.seed)
    gallery_rng = streams[_GALLERY_STREAM]
    protos = _prototypes(config, streams[_PROTOTYPE_STREAM])
    factory = _ClipFactory(config, gallery_rng)

    clips = []
    for identity in range(config.n_identities):
        for j in range(config.n_clips_per_identity):
            clips.append(factory.clip(f"gal-{identity:05d}-{j:03d}", _identity_protos(protos, identity), identity))
    for j in range(config.n_distractor_clips):
        fresh = {m: _unit_rows(gallery_rng, 1, config.dim)[0] for m in Modality}
        clips.append(factory.clip(f"dis-{j:05d}", fresh, None))

    logger.info("generated gallery: %d labeled clips, %d distractors, dim %d",
                config.n_identities * config.n_clips_per_identity, config.n_distractor_clips, config.dim)
    return clips, GroundTruth.from_clips(clips)


def generate_training(config: SynthConfig | None = None) -> list[ClipRecord]:
    """Labeled training clips for the same identities as generate()."""
    config = config or SynthConfig()
    streams = _streams(config.seed)
    protos = _prototypes(config, streams[_PROTOTYPE_STREAM])
    factory = _ClipFactory(config, streams[_TRAINING_STREAM])

    clips = [
        factory.clip(f"trn-{identity:05d}-{j:03d}", _identity_protos(protos, identity), identity)
        for identity in range(config.n_identities)
        for j in range(config.n_train_clips_per_identity)
    ]
    logger.info("generated %d training clips", len(clips))
    return clips


def identity_prototypes(config: SynthConfig) -> dict[Modality, np.ndarray]:
    """The (n_identities x dim) prototype matrix of every modality."""
    return _prototypes(config, _streams(config.seed)[_PROTOTYPE_STREAM])
