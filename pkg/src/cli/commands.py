"""CLI Commands"""

import os
import sys
from dataclasses import fields, replace
from pathlib import Path

from src import EMBEDDING_DIM
from src.audio import attach_pcm_audio
from src.config import Config, get_config_path
from src.core import DimensionMismatchError, MalformedRecordError, Modality
from src.eval import GroundTruth, MetricsReport, build_report
from src.output import bold, dim, info, print_map_summary, print_step, print_success
from src.pipeline import FusionOutcome, FusionPipeline, ModelGrid, Predictions, fuse_predictions, train_grid
from src.storage import (
    CorpusManifest,
    load_grid,
    read_predictions,
    read_retrieval,
    read_truth,
    save_grid,
    write_corpus,
    write_predictions,
    write_report,
    write_retrieval,
    write_truth,
)
from src.synth import generate, generate_training

from src.cli.utils import ensure_dir, load_corpus

GALLERY_FILE = "gallery.jsonl"
TRAIN_FILE = "train.jsonl"
TRUTH_FILE = "truth.json"
MODELS_DIR = "models"
PREDICTIONS_FILE = "predictions.jsonl"
RETRIEVAL_FILE = "retrieval.tsv"
REPORT_FILE = "report.json"


# ----------------------------------------------------------------------------
# Stage helpers (shared by the single-stage commands and `pipeline`)
# ----------------------------------------------------------------------------

def _generate(config: Config, out: Path, encoding: str) -> tuple[Path, Path, Path]:
    synth = config.synth_config()
    gallery, truth = generate(synth)
    training = generate_training(synth)
    manifest = CorpusManifest(dims=synth.dims, n_classes=synth.n_identities, encoding=encoding)
    return (
        write_corpus(gallery, out / GALLERY_FILE, manifest),
        write_corpus(training, out / TRAIN_FILE, manifest),
        write_truth(truth, out / TRUTH_FILE),
    )


def _train(corpus: str | Path, config: Config, out: Path) -> ModelGrid:
    clips, manifest = load_corpus(corpus)
    train_config = config.train_config()
    if train_config.n_classes is None and manifest.n_classes >= 2:
        train_config = replace(train_config, n_classes=manifest.n_classes)
    routing = config.routing_config()
    grid = train_grid(clips, routing, train_config, threads=config.threads, concat=config.concat_baselines)
    save_grid(grid, out, routing)
    return grid


def _predict(grid: ModelGrid, corpus: str | Path, config: Config, out: Path) -> Predictions:
    clips, _ = load_corpus(corpus)
    predictions = FusionPipeline(grid, config.routing_config(), config.cut).predict(clips)
    write_predictions(predictions, out)
    return predictions


def combine_predictions(files: list[Predictions]) -> Predictions:
    """Union of several prediction files over the same label space."""
    first = files[0]
    lists, part_a, part_b = {}, list(first.part_a_ids), list(first.part_b_ids)
    for predictions in files:
        if predictions.n_classes != first.n_classes:
            raise DimensionMismatchError(
                f"prediction files disagree on class count ({first.n_classes} vs {predictions.n_classes})")
        for model, per_label in predictions.lists.items():
            if model in lists:
                raise MalformedRecordError(f"model {model!r} appears in more than one predictions file")
            lists[model] = per_label
        part_a += [cid for cid in predictions.part_a_ids if cid not in part_a]
        part_b += [cid for cid in predictions.part_b_ids if cid not in part_b]
    return Predictions(first.n_classes, lists, tuple(part_a), tuple(part_b))


def _report(retrieval_path: Path, truth: GroundTruth, config: Config,
            outcome: FusionOutcome | None) -> MetricsReport:
    result = read_retrieval(retrieval_path)
    if outcome is None:
        return build_report(result, truth, config.cut)
    parts = {"A": (outcome.part_a, outcome.part_a_ids), "B": (outcome.part_b, outcome.part_b_ids)}
    return build_report(result, truth, config.cut, parts=parts, modalities=outcome.singles,
                        baselines=outcome.concats)


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def run_gen(args, config: Config) -> int:
    out = ensure_dir(args.out)
    gallery, training, truth = _generate(config, out, args.encoding or config.encoding)
    print_success(f"Wrote {bold(str(gallery))}, {bold(str(training))} and {bold(str(truth))}")
    return 0


def run_embed_audio(args, config: Config) -> int:
    clips, manifest = load_corpus(args.corpus)
    clips, n_audio = attach_pcm_audio(clips, args.pcm_dir, args.sample_rate)
    dims = {**manifest.dims, Modality.AUDIO: EMBEDDING_DIM}
    out = write_corpus(clips, args.out, replace(manifest, dims=dims))
    print_success(f"Embedded audio for {n_audio} of {len(clips)} clips into {bold(str(out))}")
    return 0


def run_train(args, config: Config) -> int:
    grid = _train(args.corpus, config, Path(args.out))
    n_a, n_b = grid.size
    extra = f" and {len(grid.concat)} baseline" if grid.concat else ""
    print_success(f"Trained {n_a} Part A, {n_b} Part B{extra} models into {bold(args.out)}")
    return 0


def run_predict(args, config: Config) -> int:
    predictions = _predict(load_grid(args.models), args.corpus, config, Path(args.out))
    print_success(f"Routed {len(predictions.part_a_ids)} clips to Part A and "
                  f"{len(predictions.part_b_ids)} to Part B; lists in {bold(args.out)}")
    return 0


def run_fuse(args, config: Config) -> int:
    predictions = combine_predictions([read_predictions(path) for path in args.predictions])
    outcome = fuse_predictions(predictions, config.cut)
    write_retrieval(outcome.fused, args.out, labels=range(predictions.n_classes))
    print_success(f"Fused {len(predictions.models)} models into {bold(args.out)}")
    return 0


def run_eval(args, config: Config) -> int:
    truth = read_truth(args.truth)
    outcome = None
    if args.predictions:
        outcome = fuse_predictions(read_predictions(args.predictions), config.cut)
    report = _report(Path(args.retrieval), truth, config, outcome)
    if args.out:
        write_report(report, args.out)
    if args.json:
        sys.stdout.write(report.to_json())
    else:
        print_map_summary(report)
    return 0


def run_pipeline(args, config: Config) -> int:
    out = ensure_dir(args.out)

    if bool(args.gallery) != bool(args.train_corpus):
        raise MalformedRecordError("--train and --gallery must be given together")
    if args.gallery:
        gallery, training = Path(args.gallery), Path(args.train_corpus)
        truth = read_truth(args.truth) if args.truth else GroundTruth.from_clips(load_corpus(gallery)[0])
    else:
        print_step(f"Generating synthetic corpus (seed {config.seed})")
        gallery, training, truth_path = _generate(config, out, config.encoding)
        truth = read_truth(truth_path)

    print_step(f"Training model grid ({config.threads} thread{'s' if config.threads != 1 else ''})")
    grid = _train(training, config, out / MODELS_DIR)

    print_step("Routing and predicting")
    predictions = _predict(grid, gallery, config, out / PREDICTIONS_FILE)

    print_step("Fusing")
    outcome = fuse_predictions(predictions, config.cut)
    retrieval = write_retrieval(outcome.fused, out / RETRIEVAL_FILE, labels=range(predictions.n_classes))

    report = _report(retrieval, truth, config, outcome)
    write_report(report, out / REPORT_FILE)
    print_map_summary(report)
    print_success(f"Artifacts in {bold(str(out))}")
    return 0


def display_config(config: Config) -> int:
    """Display the effective configuration."""
    config_path = get_config_path()

    print(f"\n{bold('Current Configuration')}\n")
    if config_path:
        print(f"  {dim('Loaded from:')} {config_path}")
    else:
        print(f"  {dim('Loaded from:')} defaults (no .pidfuserc found)")

    print()
    print(f"  {bold('Settings:')}")
    width = max(len(f.name) for f in fields(config)) + 1
    for f in fields(config):
        print(f"    {(f.name + ':').ljust(width)} {info(str(getattr(config, f.name)))}")

    print(f"\n  {dim('Config locations:')}")
    print(f"    Env:    $PIDFUSE_CONFIG")
    print(f"    Local:  .pidfuserc (in current directory)")
    print(f"    Global: ~/.pidfuserc\n")
    return 0


def run_install_completion() -> int:
    """Install shell tab completion."""
    shell = os.environ.get('SHELL', '')
    line = 'eval "$(register-python-argcomplete pidfuse)"'

    print(f"\n{bold('Tab Completion Setup')}\n")

    if 'zsh' in shell or 'bash' in shell:
        rc_file = os.path.expanduser('~/.zshrc' if 'zsh' in shell else '~/.bashrc')
        print(f"Add this line to {dim(rc_file)}:\n")
        print(f"  {line}\n")
        print(f"Then run: {dim('source ' + rc_file)}")
    else:
        print("Run one of these based on your shell:\n")
        print(f"  {dim('# Bash/Zsh')}")
        print(f"  {line}\n")
        print(f"  {dim('# Fish')}")
        print("  register-python-argcomplete --shell fish pidfuse | source")

    print(f"\n{dim('After setup, press TAB to autocomplete sub-commands and flags.')}")
    return 0
