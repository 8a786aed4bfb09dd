"""Configuration Management Package"""

import json
import math
import os
import sys
from dataclasses import dataclass, asdict, field, fields
from pathlib import Path
from typing import Optional

from src import MODALITIES, RETRIEVAL_CUT
from src.mlp import TrainConfig
from src.pipeline import RoutingConfig
from src.synth import SynthConfig

VALID_ENCODINGS = {"text", "base64"}
ENV_VAR = "PIDFUSE_CONFIG"


def _default_bands() -> list[float]:
    return [40.0, 60.0, 80.0, 100.0]


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return (isinstance(value, (int, float)) and not isinstance(value, bool)
            and math.isfinite(value))


@dataclass
class Config:
    """Flat run configuration: training, routing and synthetic-data knobs."""
    # Training (one MLP)
    learning_rate: float = 0.0008
    batch_size: int = 512
    dropout_keep_prob: float = 0.5
    epochs: int = 30
    hidden_dim: int = 1024
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    bn_momentum: float = 0.9
    n_classes: Optional[int] = None

    # Routing and model grid
    quality_bands: list[float] = field(default_factory=_default_bands)
    part_a_quality_threshold: float = 40.0
    part_a_detection_threshold: float = 0.5
    folds: int = 5
    concat_baselines: bool = True

    # Synthetic corpus
    n_identities: int = 50
    n_clips_per_identity: int = 10
    n_train_clips_per_identity: int = 20
    n_distractor_clips: int = 100
    dim: int = 64
    noise_reference_dim: int = 16
    min_frames: int = 3
    max_frames: int = 12
    face_noise: float = 0.2
    head_noise: float = 0.6
    audio_noise: float = 1.2
    face_dropout: float = 0.15
    head_dropout: float = 0.1
    audio_dropout: float = 0.1
    quality_noise_coupling: float = 1.0
    quality_jitter: float = 20.0
    detection_noise: float = 0.05

    # Run
    cut: int = RETRIEVAL_CUT
    threads: int = 1
    seed: int = 7
    encoding: str = "text"  # corpus embedding encoding written by `gen`

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def validate(self) -> list[str]:
        """Validate config values and return list of warnings.

        Invalid values are replaced with defaults after warning.
        """
        warnings = []
        defaults = Config()

        def reset(name: str, reason: str) -> None:
            default = getattr(defaults, name)
            warnings.append(f"Invalid {name} '{getattr(self, name)}' ({reason}), using {default!r}")
            setattr(self, name, default)

        for name in ("batch_size", "epochs", "hidden_dim", "folds", "n_identities",
                     "n_clips_per_identity", "n_train_clips_per_identity", "dim", "noise_reference_dim",
                     "min_frames", "max_frames", "cut", "threads"):
            value = getattr(self, name)
            if not _is_int(value) or value < 1:
                reset(name, "must be a positive integer")

        for name in ("n_distractor_clips",):
            value = getattr(self, name)
            if not _is_int(value) or value < 0:
                reset(name, "must be a non-negative integer")

        if not _is_int(self.seed) or self.seed < 0:
            reset("seed", "must be a non-negative integer")
        if not isinstance(self.concat_baselines, bool):
            reset("concat_baselines", "must be true or false")

        if self.n_classes is not None and (not _is_int(self.n_classes) or self.n_classes < 2):
            reset("n_classes", "must be an integer >= 2")

        if not _is_number(self.learning_rate) or self.learning_rate < 0:
            reset("learning_rate", "must be >= 0")
        if not _is_number(self.dropout_keep_prob) or not 0.0 < self.dropout_keep_prob <= 1.0:
            reset("dropout_keep_prob", "must lie in (0, 1]")
        for name in ("beta1", "beta2", "bn_momentum"):
            value = getattr(self, name)
            if not _is_number(value) or not 0.0 <= value < 1.0:
                reset(name, "must lie in [0, 1)")
        if not _is_number(self.epsilon) or self.epsilon <= 0:
            reset("epsilon", "must be > 0")

        bands = self.quality_bands
        if (not isinstance(bands, list) or not bands or not all(_is_number(b) and b >= 0 for b in bands)
                or any(lo >= hi for lo, hi in zip(bands, bands[1:]))):
            reset("quality_bands", "must be a non-empty strictly increasing list of bounds >= 0")
        for name in ("part_a_quality_threshold", "part_a_detection_threshold",
                     "quality_noise_coupling", "quality_jitter", "detection_noise"):
            value = getattr(self, name)
            if not _is_number(value) or value < 0:
                reset(name, "must be >= 0")

        for modality in MODALITIES:
            noise, dropout = f"{modality}_noise", f"{modality}_dropout"
            if not _is_number(getattr(self, noise)) or getattr(self, noise) < 0:
                reset(noise, "must be >= 0")
            if not _is_number(getattr(self, dropout)) or not 0.0 <= getattr(self, dropout) <= 1.0:
                reset(dropout, "must lie in [0, 1]")

        if self.min_frames > self.max_frames:
            warnings.append(f"min_frames {self.min_frames} exceeds max_frames {self.max_frames}, "
                            f"using {defaults.min_frames}..{defaults.max_frames}")
            self.min_frames, self.max_frames = defaults.min_frames, defaults.max_frames

        if self.encoding not in VALID_ENCODINGS:
            reset("encoding", f"expected one of {sorted(VALID_ENCODINGS)}")

        return warnings

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=float(self.learning_rate),
            batch_size=self.batch_size,
            dropout_keep_prob=float(self.dropout_keep_prob),
            epochs=self.epochs,
            beta1=float(self.beta1),
            beta2=float(self.beta2),
            epsilon=float(self.epsilon),
            rng_seed=self.seed,
            hidden_dim=self.hidden_dim,
            n_classes=self.n_classes,
            bn_momentum=float(self.bn_momentum),
        )

    def routing_config(self) -> RoutingConfig:
        return RoutingConfig(
            quality_bands=tuple(self.quality_bands),
            part_a_quality_threshold=float(self.part_a_quality_threshold),
            part_a_detection_threshold=float(self.part_a_detection_threshold),
            folds=self.folds,
        )

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            n_identities=self.n_identities,
            n_clips_per_identity=self.n_clips_per_identity,
            n_train_clips_per_identity=self.n_train_clips_per_identity,
            n_distractor_clips=self.n_distractor_clips,
            dim=self.dim,
            noise_reference_dim=self.noise_reference_dim,
            frames_per_clip=(self.min_frames, self.max_frames),
            modality_noise={m: getattr(self, f"{m}_noise") for m in MODALITIES},
            modality_dropout={m: getattr(self, f"{m}_dropout") for m in MODALITIES},
            quality_noise_coupling=float(self.quality_noise_coupling),
            quality_jitter=float(self.quality_jitter),
            detection_noise=float(self.detection_noise),
            seed=self.seed,
        )

    @classmethod
    def from_dict(cls, data: dict) -> 'Config':
        valid_keys = {f.name for f in fields(cls)}
        filtered = {k: v for k, v in data.items() if k in valid_keys}
        config = cls(**filtered)
        # Validate and print warnings to stderr
        for warning in config.validate():
            print(f"Config warning: {warning}", file=sys.stderr)
        return config


class ConfigManager:
    """Manages loading and saving configuration.

    Lookup order: explicit path, $PIDFUSE_CONFIG, ./.pidfuserc, ~/.pidfuserc.
    """

    CONFIG_FILENAME = ".pidfuserc"

    def __init__(self):
        self._config: Optional[Config] = None
        self._config_path: Optional[Path] = None

    def load(self, path: str | Path | None = None) -> Config:
        if path is not None:
            path = Path(path)
            if not path.is_file():
                raise FileNotFoundError(f"config file not found: {path}")
            self._config = self._load_from_file(path)
            self._config_path = path
            return self._config

        if self._config is not None:
            return self._config

        candidates = []
        if os.environ.get(ENV_VAR):
            candidates.append(Path(os.environ[ENV_VAR]))
        candidates += [Path.cwd() / self.CONFIG_FILENAME, Path.home() / self.CONFIG_FILENAME]

        for candidate in candidates:
            if candidate.is_file():
                self._config = self._load_from_file(candidate)
                self._config_path = candidate
                return self._config

        self._config = Config()
        return self._config

    def _load_from_file(self, path: Path) -> Config:
        try:
            with open(path, 'r') as f:
                data = json.load(f)
            if not isinstance(data, dict):
                raise ValueError("top level must be a JSON object")
            return Config.from_dict(data)
        except (json.JSONDecodeError, ValueError, TypeError, IOError) as e:
            print(f"Warning: Could not load {path}: {e}", file=sys.stderr)
            return Config()

    def save(self, config: Config, path: str | Path | None = None, global_config: bool = False) -> Path:
        if path is None:
            path = Path.home() / self.CONFIG_FILENAME if global_config else Path.cwd() / self.CONFIG_FILENAME
        path = Path(path)
        with open(path, 'w') as f:
            json.dump(config.to_dict(), f, indent=2)
            f.write("\n")
        return path

    def get_config_path(self) -> Optional[Path]:
        return self._config_path


_manager = ConfigManager()


def load_config(path: str | Path | None = None) -> Config:
    return _manager.load(path)


def save_config(config: Config, path: str | Path | None = None, global_config: bool = False) -> Path:
    return _manager.save(config, path, global_config)


def get_config_path() -> Optional[Path]:
    return _manager.get_config_path()


__all__ = [
    "Config",
    "ConfigManager",
    "load_config",
    "save_config",
    "get_config_path",
    "VALID_ENCODINGS",
    "ENV_VAR",
]
