"""Audio front-end: 16 kHz mono PCM -> magnitude spectrogram -> 512-d vector.

25 ms periodic Hamming window (400 samples), 10 ms hop (160 samples),
zero-padded 512-point FFT, bins 0..256. No mel scaling, no log.
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from src import EMBEDDING_DIM
from src.core import (
    ClipRecord,
    Embedding,
    EmptyClipError,
    EmptyInputError,
    MalformedRecordError,
    Modality,
    NonFiniteInputError,
    ScoreOutOfRangeError,
    TooShortError,
    WrongSampleRateError,
)

logger = logging.getLogger(__name__)

SAMPLE_RATE = 16000
WINDOW = 400
HOP = 160
N_FFT = 512
N_BINS = N_FFT // 2 + 1
PCM_SUFFIX = ".pcm"


@dataclass(frozen=True)
class Waveform:
    """Mono samples in [-1, 1] at `sample_rate` Hz."""
    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64).reshape(-1))
        if self.sample_rate <= 0:
            raise WrongSampleRateError(f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise NonFiniteInputError("waveform contains NaN or Inf")
        if self.samples.size and np.abs(self.samples).max() > 1.0:
            raise ScoreOutOfRangeError(f"samples must lie in [-1, 1], peak is {np.abs(self.samples).max():g}")

    @property
    def duration(self) -> float:
        return self.samples.shape[0] / self.sample_rate


def hamming(n: int = WINDOW) -> np.ndarray:
    """Periodic Hamming window 0.54 - 0.46 cos(2 pi k / n)."""
    k = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * k / n)


def n_frames(n_samples: int) -> int:
    return (n_samples - WINDOW) // HOP + 1 if n_samples >= WINDOW else 0


def frame_signal(samples: np.ndarray) -> np.ndarray:
    """(frames x 400) matrix of overlapping windows, not yet tapered."""
    return np.lib.stride_tricks.sliding_window_view(samples, WINDOW)[::HOP]


def spectrogram(waveform: Waveform) -> np.ndarray:
    """(frames x 257) magnitude spectrogram."""
    if waveform.sample_rate != SAMPLE_RATE:
        raise WrongSampleRateError(f"expected {SAMPLE_RATE} Hz, got {waveform.sample_rate} Hz")
    if waveform.samples.shape[0] < WINDOW:
        raise TooShortError(f"need at least {WINDOW} samples, got {waveform.samples.shape[0]}")
    frames = frame_signal(waveform.samples) * hamming()
    return np.abs(np.fft.rfft(frames, n=N_FFT, axis=1))


def embed_audio(spec: np.ndarray) -> Embedding:
    """Placeholder speaker embedding: per-bin mean and std over time, cut to 512.

    Stands in for a trained speaker CNN, which this toolkit does not ship.
    """
    spec = np.asarray(spec, dtype=np.float64)
    if spec.ndim != 2 or spec.shape[0] == 0 or spec.shape[1] == 0:
        raise EmptyInputError(f"expected a non-empty frames x bins matrix, got shape {spec.shape}")
    stats = np.concatenate([spec.mean(axis=0), spec.std(axis=0)])
    return Embedding(stats[:EMBEDDING_DIM])


def read_pcm(path: str | Path, sample_rate: int = SAMPLE_RATE) -> Waveform:
    """Decode raw 16-bit little-endian mono PCM (no container)."""
    raw = Path(path).read_bytes()
    if len(raw) % 2:
        raise MalformedRecordError(f"{path}: {len(raw)} bytes is not a whole number of 16-bit samples")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return Waveform(samples, sample_rate)


def embed_pcm(path: str | Path, sample_rate: int = SAMPLE_RATE) -> Embedding:
    return embed_audio(spectrogram(read_pcm(path, sample_rate)))


def attach_pcm_audio(clips: list[ClipRecord], pcm_dir: str | Path,
                     sample_rate: int = SAMPLE_RATE) -> tuple[list[ClipRecord], int]:
    """Replace every clip's audio embedding with one computed from `<pcm_dir>/<clip_id>.pcm`.

    Clips without a PCM file lose their audio embedding, so the corpus keeps
    a single audio width. Returns the new clips and how many got audio.
    """
    pcm_dir = Path(pcm_dir)
    if not pcm_dir.is_dir():
        raise NotADirectoryError(f"PCM directory {pcm_dir} does not exist")
    out, n_audio = [], 0
    for clip in clips:
        embeddings = {m: e for m, e in clip.clip_embeddings.items() if m is not Modality.AUDIO}
        path = pcm_dir / f"{clip.clip_id}{PCM_SUFFIX}"
        if path.is_file():
            embeddings[Modality.AUDIO] = embed_pcm(path, sample_rate)
            n_audio += 1
        elif not clip.frames and not embeddings:
            raise EmptyClipError(f"{clip.clip_id}: audio-only clip has no {path.name}")
        out.append(replace(clip, clip_embeddings=embeddings))
    logger.info("embedded %d of %d clips from %s", n_audio, len(clips), pcm_dir)
    return out, n_audio
