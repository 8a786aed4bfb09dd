"""Audio Front-End Package"""

from src.audio.spectrogram import (
    Waveform,
    SAMPLE_RATE,
    WINDOW,
    HOP,
    N_FFT,
    N_BINS,
    hamming,
    n_frames,
    spectrogram,
    embed_audio,
    read_pcm,
    embed_pcm,
    attach_pcm_audio,
    PCM_SUFFIX,
)

__all__ = [
    "Waveform",
    "SAMPLE_RATE",
    "WINDOW",
    "HOP",
    "N_FFT",
    "N_BINS",
    "hamming",
    "n_frames",
    "spectrogram",
    "embed_audio",
    "read_pcm",
    "embed_pcm",
    "attach_pcm_audio",
    "PCM_SUFFIX",
]
