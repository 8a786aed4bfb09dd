"""
Tests for the seeded synthetic corpus generator.
"""

import numpy as np
import pytest

from src.aggregate import aggregate_clip
from src.core import Modality, validate_clip
from src.synth import SynthConfig, generate, generate_training, identity_prototypes


@pytest.fixture(scope="module")
def small_config():
    return SynthConfig(n_identities=5, n_clips_per_identity=4, n_train_clips_per_identity=3,
                       n_distractor_clips=6, dim=8, seed=3)


# ---------------------------------------------------------------------------
# Shape and determinism
# ---------------------------------------------------------------------------

class TestGenerate:

    def test_counts(self, small_config):
        clips, truth = generate(small_config)
        assert len(clips) == 5 * 4 + 6
        assert truth.n_labels == 5
        assert all(truth.m(label) == 4 for label in truth.labels)
        assert sum(1 for c in clips if not c.is_labeled) == 6

    def test_default_corpus_shape(self):
        clips, truth = generate(SynthConfig())
        assert len(clips) == 600
        assert truth.n_labels == 50

    def test_same_seed_same_corpus(self, small_config):
        a, _ = generate(small_config)
        b, _ = generate(small_config)
        assert [c.clip_id for c in a] == [c.clip_id for c in b]
        for x, y in zip(a, b):
            assert x.frames == y.frames
            assert x.clip_embeddings == y.clip_embeddings

    def test_different_seed_differs(self, small_config):
        a, _ = generate(small_config)
        b, _ = generate(SynthConfig(n_identities=5, n_clips_per_identity=4, n_train_clips_per_identity=3,
                                    n_distractor_clips=6, dim=8, seed=4))
        assert any(x.clip_embeddings != y.clip_embeddings or x.frames != y.frames for x, y in zip(a, b))

    def test_clip_ids_are_unique(self, small_config):
        clips, _ = generate(small_config)
        ids = [c.clip_id for c in clips] + [c.clip_id for c in generate_training(small_config)]
        assert len(ids) == len(set(ids))

    def test_records_are_valid(self, small_config):
        clips, _ = generate(small_config)
        for clip in clips + generate_training(small_config):
            assert validate_clip(clip, small_config.dims, n_classes=5) is None

    def test_default_training_size(self):
        assert SynthConfig().n_train_clips_per_identity == 20

    def test_training_labels(self, small_config):
        training = generate_training(small_config)
        assert len(training) == 15
        assert sorted({c.label for c in training}) == list(range(5))


# ---------------------------------------------------------------------------
# Frame scores and modality absence
# ---------------------------------------------------------------------------

class TestFrameScores:

    def test_scores_in_range(self):
        clips, _ = generate(SynthConfig(n_identities=10, n_distractor_clips=20, dim=4))
        frames = [f for c in clips for f in c.frames]
        quality = np.array([f.quality_score for f in frames])
        detection = np.array([f.detection_score for f in frames])
        assert quality.min() >= 0.0 and quality.max() <= 200.0
        assert detection.min() >= 0.0 and detection.max() <= 1.0

    def test_detection_tracks_quality(self):
        clips, _ = generate(SynthConfig(n_identities=10, n_distractor_clips=0, dim=4))
        frames = [f for c in clips for f in c.frames]
        quality = np.array([f.quality_score for f in frames])
        detection = np.array([f.detection_score for f in frames])
        assert np.corrcoef(quality, detection)[0, 1] > 0.8

    def test_frame_count_range(self):
        config = SynthConfig(n_identities=10, n_distractor_clips=0, dim=4, frames_per_clip=(2, 5),
                             modality_dropout={"face": 0.0, "head": 0.0, "audio": 0.0})
        clips, _ = generate(config)
        assert all(2 <= c.n_frames <= 5 for c in clips)

    def test_no_clip_loses_every_modality(self):
        config = SynthConfig(n_identities=5, n_distractor_clips=5, dim=4,
                             modality_dropout={"face": 1.0, "head": 1.0, "audio": 1.0})
        clips, _ = generate(config)
        assert all(c.has_modality(Modality.AUDIO) and not c.frames for c in clips)

    def test_dropout_removes_modalities(self):
        config = SynthConfig(n_identities=5, n_distractor_clips=0, dim=4,
                             modality_dropout={"face": 0.0, "head": 1.0, "audio": 0.0})
        clips, _ = generate(config)
        assert all(Modality.HEAD not in c.clip_embeddings and c.frames for c in clips)


# ---------------------------------------------------------------------------
# Noise
# ---------------------------------------------------------------------------

class TestNoise:

    def test_noiseless_face_pools_to_prototype(self):
        config = SynthConfig(n_identities=4, n_clips_per_identity=2, n_distractor_clips=0, dim=8,
                             modality_noise={"face": 0.0, "head": 0.0, "audio": 0.0},
                             modality_dropout={"face": 0.0, "head": 0.0, "audio": 0.0})
        clips, _ = generate(config)
        protos = identity_prototypes(config)
        for clip in clips:
            np.testing.assert_allclose(aggregate_clip(clip.frames).values, protos[Modality.FACE][clip.label],
                                       atol=1e-12)
            np.testing.assert_allclose(clip.clip_embeddings[Modality.HEAD].values,
                                       protos[Modality.HEAD][clip.label])

    def test_prototypes_are_unit_norm(self, small_config):
        protos = identity_prototypes(small_config)
        for modality in Modality:
            np.testing.assert_allclose(np.linalg.norm(protos[modality], axis=1), 1.0)

    def test_low_quality_frames_are_noisier(self):
        config = SynthConfig(n_identities=20, n_distractor_clips=0, dim=16,
                             modality_dropout={"face": 0.0, "head": 0.0, "audio": 0.0})
        clips, _ = generate(config)
        protos = identity_prototypes(config)[Modality.FACE]
        low, high = [], []
        for clip in clips:
            for frame in clip.frames:
                error = np.linalg.norm(frame.embedding.values - protos[clip.label])
                (low if frame.quality_score < 50 else high if frame.quality_score > 150 else []).append(error)
        assert np.mean(low) > np.mean(high)

    @pytest.mark.parametrize("overrides", [
        pytest.param({"modality_noise": {"face": -0.1}}, id="negative-noise"),
        pytest.param({"modality_dropout": {"head": 1.5}}, id="dropout-above-one"),
        pytest.param({"frames_per_clip": (5, 2)}, id="inverted-frame-range"),
        pytest.param({"quality_noise_coupling": -1.0}, id="negative-coupling"),
        pytest.param({"seed": -1}, id="negative-seed"),
        pytest.param({"noise_reference_dim": 0}, id="zero-reference-dim"),
    ])
    def test_invalid_config(self, overrides):
        with pytest.raises(ValueError):
            SynthConfig(**overrides)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    ranks[order] = np.arange(len(values), dtype=float)
    for value in np.unique(values):
        tied = values == value
        ranks[tied] = ranks[tied].mean()
    return ranks


def _head_error_rate(level: float) -> float:
    config = SynthConfig(n_identities=50, n_clips_per_identity=10, n_distractor_clips=0, dim=64,
                         modality_noise={"head": level},
                         modality_dropout={"face": 1.0, "head": 0.0, "audio": 1.0}, seed=11)
    clips, _ = generate(config)
    protos = identity_prototypes(config)[Modality.HEAD]
    wrong = 0
    for clip in clips:
        distances = np.linalg.norm(protos - clip.clip_embeddings[Modality.HEAD].values, axis=1)
        wrong += int(distances.argmin() != clip.label)
    return wrong / len(clips)


class TestNoiseScaling:

    def test_scale_is_one_at_reference_width(self):
        assert SynthConfig(dim=16, noise_reference_dim=16).noise_scale == 1.0
        assert SynthConfig(dim=64, noise_reference_dim=16).noise_scale == pytest.approx(0.5)

    @pytest.mark.parametrize("dim", [16, 64, 256])
    def test_noise_energy_does_not_depend_on_width(self, dim):
        config = SynthConfig(n_identities=20, n_clips_per_identity=20, n_distractor_clips=0, dim=dim,
                             modality_noise={"head": 0.5},
                             modality_dropout={"face": 1.0, "head": 0.0, "audio": 1.0})
        clips, _ = generate(config)
        protos = identity_prototypes(config)[Modality.HEAD]
        energy = np.mean([np.sum((c.clip_embeddings[Modality.HEAD].values - protos[c.label]) ** 2)
                          for c in clips])
        # 0.5**2 * 16
        assert energy == pytest.approx(4.0, rel=0.1)

    def test_more_noise_means_more_confusion(self):
        levels = np.linspace(0.2, 1.0, 9)
        errors = np.array([_head_error_rate(level) for level in levels])
        rho = np.corrcoef(_average_ranks(levels), _average_ranks(errors))[0, 1]
        assert rho > 0.9
        assert errors[0] < errors[-1]
