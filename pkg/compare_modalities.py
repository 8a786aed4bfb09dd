"""
Comparison Script - See how each modality and the fused run score.

Usage:
  python compare_modalities.py               # run all scenarios
  python compare_modalities.py -s noisy      # run one scenario
  python compare_modalities.py -e 10 -t 4    # fewer epochs, 4 training threads
"""

from src.mlp import TrainConfig
from src.pipeline import FusionPipeline, RoutingConfig, train_grid
from src.eval import build_report
from src.output import print_map_summary
from src.synth import SynthConfig, generate, generate_training

# Synthetic corpora of increasing difficulty
SCENARIOS = {
    "clean": {
        "name": "Clean faces, clear voices",
        "synth": {"modality_noise": {"face": 0.1, "head": 0.3, "audio": 0.6}},
    },
    "default": {
        "name": "Default corpus (face > head > audio)",
        "synth": {},
    },
    "noisy": {
        "name": "Blurry faces, frequent dropouts",
        "synth": {
            "modality_noise": {"face": 0.5, "head": 0.8, "audio": 1.2},
            "modality_dropout": {"face": 0.4, "head": 0.2, "audio": 0.1},
            "quality_noise_coupling": 2.0,
        },
    },
}


def run_scenario(key: str, epochs: int = 40, threads: int = 1):
    """Train a grid on one scenario and print its MAP table."""
    scenario = SCENARIOS[key]
    print(f"\n{'='*60}")
    print(f"SCENARIO: {scenario['name']}")
    print(f"{'='*60}\n")

    synth = SynthConfig(**scenario["synth"])
    gallery, truth = generate(synth)
    training = generate_training(synth)
    print(f"Gallery: {len(gallery)} clips, {truth.n_labels} IDs")
    print(f"Training: {len(training)} clips\n")

    config = TrainConfig(hidden_dim=128, epochs=epochs, batch_size=64, learning_rate=0.003,
                         dropout_keep_prob=0.8, rng_seed=synth.seed)
    print("Training...\n")
    grid = train_grid(training, RoutingConfig(), config, threads=threads, concat=True)

    outcome = FusionPipeline(grid).run_detailed(gallery)
    parts = {"A": (outcome.part_a, outcome.part_a_ids), "B": (outcome.part_b, outcome.part_b_ids)}
    report = build_report(outcome.fused, truth, parts=parts, modalities=outcome.singles,
                          baselines=outcome.concats)

    print(f"Part A: {len(outcome.part_a_ids)} clips, Part B: {len(outcome.part_b_ids)} clips\n")
    print_map_summary(report)


def run_all(epochs: int = 40, threads: int = 1):
    """Run every scenario."""
    print("\n" + "="*60)
    print("PERSON ID FUSION - MODALITY COMPARISON")
    print("="*60)

    for key in ["clean", "default", "noisy"]:
        run_scenario(key, epochs, threads)
        print("\n")


if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description="Compare single-modality and fused MAP")
    parser.add_argument("-s", "--scenario", choices=["clean", "default", "noisy", "all"], default="all")
    parser.add_argument("-e", "--epochs", type=int, default=40)
    parser.add_argument("-t", "--threads", type=int, default=1)
    args = parser.parse_args()

    if args.scenario == "all":
        run_all(args.epochs, args.threads)
    else:
        run_scenario(args.scenario, args.epochs, args.threads)
