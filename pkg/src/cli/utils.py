"""CLI Utility Functions"""

import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from src.config import Config
from src.core import ClipRecord, validate_clip
from src.storage import CorpusManifest, read_corpus_with_manifest
from src.output import print_warning

ENV_OVERRIDES = {"PIDFUSE_SEED": "seed", "PIDFUSE_THREADS": "threads", "PIDFUSE_CUT": "cut"}


def configure_logging(verbose: bool) -> None:
    """Library loggers go to stderr; DEBUG with --verbose, WARNING otherwise."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def apply_overrides(config: Config, args) -> Config:
    """Layer environment variables, then CLI flags, over the loaded config.

    Precedence: CLI args > environment variables > config file.
    """
    config = replace(config)
    for var, name in ENV_OVERRIDES.items():
        raw = os.environ.get(var)
        if raw is None:
            continue
        try:
            setattr(config, name, int(raw))
        except ValueError:
            print_warning(f"Ignoring {var}={raw!r}: not an integer")

    for name in ("seed", "threads", "cut"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)

    for warning in config.validate():
        print_warning(warning)
    return config


def load_corpus(path: str | Path) -> tuple[list[ClipRecord], CorpusManifest]:
    """Read a corpus and validate every clip against its manifest."""
    clips, manifest = read_corpus_with_manifest(path)
    n_classes = manifest.n_classes or None
    for clip in clips:
        validate_clip(clip, manifest.dims, n_classes)
    return clips, manifest


def ensure_dir(path: str | Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
