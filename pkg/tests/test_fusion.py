"""
Tests for decision-level rank fusion and the Part A / Part B merge.
"""

import math

import numpy as np
import pytest

from src.core import (
    DuplicateClipError,
    FusionError,
    InvalidRankError,
    PredictionEntry,
    PredictionList,
    RetrievalResult,
)
from src.fusion import fuse_all, fuse_label, merge_results, min_max_normalize


def plist(label, *entries):
    """PredictionList from (clip_id, score) pairs given in rank order."""
    return PredictionList(label, tuple(
        PredictionEntry(cid, score, rank) for rank, (cid, score) in enumerate(entries, start=1)))


def brute_force(predictions, labels, k):
    """Direct transcription of the weighted-score definition, one clip at a time."""
    rankings = {}
    for label in labels:
        clips = set()
        for per_label in predictions.values():
            if label in per_label:
                clips.update(e.clip_id for e in per_label[label].entries)
        scored = []
        for cid in clips:
            terms = []
            for name in sorted(predictions):
                per_label = predictions[name]
                if label not in per_label:
                    continue
                for e in per_label[label].entries:
                    if e.clip_id == cid:
                        terms.append(e.result_score / e.rank_score)
            w = math.fsum(terms)
            scored.append((cid, w))
        scored.sort(key=lambda item: (-item[1], item[0]))
        rankings[label] = scored[:k]
    return rankings


def random_predictions(rng, n_models=3, n_labels=4, n_clips=30, k=10):
    predictions = {}
    clip_ids = [f"clip{i:03d}" for i in range(n_clips)]
    for m in range(n_models):
        per_label = {}
        for label in range(n_labels):
            if rng.random() < 0.15:
                continue
            chosen = rng.choice(n_clips, size=int(rng.integers(1, k + 1)), replace=False)
            # Coarse scores so ties occur.
            scores = np.round(rng.random(chosen.shape[0]), 1)
            per_label[label] = PredictionList.from_scores(
                label, [(clip_ids[i], float(s)) for i, s in zip(chosen, scores)], limit=k)
        predictions[f"model{m}"] = per_label
    return predictions


# ---------------------------------------------------------------------------
# fuse_label
# ---------------------------------------------------------------------------

class TestFuseLabel:

    def test_clip_listed_by_two_models(self):
        face = plist(0, ("x", 0.9))
        head = plist(0, ("y", 0.8), ("x", 0.6))
        fused = dict(fuse_label(0, [face, head]))
        assert fused["x"] == pytest.approx(0.9 / 1 + 0.6 / 2)
        assert fused["y"] == pytest.approx(0.8)

    def test_order_by_weight_then_clip_id(self):
        a = plist(0, ("b", 0.5), ("a", 1.0))
        fused = fuse_label(0, [a])
        # b: 0.5/1 = 0.5, a: 1.0/2 = 0.5 -> tie broken by clip id
        assert [cid for cid, _ in fused] == ["a", "b"]

    def test_no_lists(self):
        assert fuse_label(0, []) == []

    def test_duplicate_clip_in_one_list(self):
        bad = PredictionList(0, (PredictionEntry("x", 0.9, 1), PredictionEntry("x", 0.5, 2)))
        with pytest.raises(DuplicateClipError):
            fuse_label(0, [bad])

    def test_model_order_does_not_matter(self):
        lists = [plist(0, ("a", 0.3), ("b", 0.2)), plist(0, ("b", 0.7)), plist(0, ("a", 0.1), ("c", 0.05))]
        assert fuse_label(0, lists) == fuse_label(0, list(reversed(lists)))

    @pytest.mark.parametrize("rank", [0, -3])
    def test_rank_below_one(self, rank):
        bad = PredictionList(0, (PredictionEntry("x", 0.9, rank),))
        with pytest.raises(InvalidRankError):
            fuse_label(0, [bad])
        assert issubclass(InvalidRankError, FusionError)

    def test_single_model_keeps_its_order(self, rng):
        ids = [f"c{i:02d}" for i in range(30)]
        scores = rng.uniform(0.01, 1.0, 30).round(2)
        single = PredictionList.from_scores(0, list(zip(ids, scores.tolist())))
        fused = fuse_label(0, [single])
        assert [cid for cid, _ in fused] == [e.clip_id for e in single.entries]
        assert [w for _, w in fused] == pytest.approx([e.result_score / e.rank_score for e in single.entries])

    def test_weights_add_across_model_sets(self, rng):
        def random_list():
            ids = rng.choice([f"c{i}" for i in range(12)], size=6, replace=False)
            return PredictionList.from_scores(0, list(zip(ids.tolist(), rng.uniform(0, 1, 6).tolist())))

        first = [random_list() for _ in range(3)]
        second = [random_list() for _ in range(2)]
        a, b = dict(fuse_label(0, first)), dict(fuse_label(0, second))
        both = dict(fuse_label(0, first + second))
        for cid, weight in both.items():
            assert weight == pytest.approx(a.get(cid, 0.0) + b.get(cid, 0.0), abs=1e-12)

    def test_raising_a_score_never_lowers_the_clip(self, rng):
        for _ in range(20):
            lists = [PredictionList.from_scores(0, [(f"c{i}", s) for i, s in enumerate(rng.uniform(0, 1, 8))])
                     for _ in range(3)]
            target = lists[1].entries[4]
            before = [cid for cid, _ in fuse_label(0, lists)].index(target.clip_id)
            boosted = tuple(
                PredictionEntry(e.clip_id, e.result_score + 0.5, e.rank_score) if e is target else e
                for e in lists[1].entries)
            lists[1] = PredictionList(0, boosted)
            after = [cid for cid, _ in fuse_label(0, lists)].index(target.clip_id)
            assert after <= before


# ---------------------------------------------------------------------------
# fuse_all
# ---------------------------------------------------------------------------

class TestFuseAll:

    def test_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            k = int(rng.integers(1, 12))
            predictions = random_predictions(rng, n_models=int(rng.integers(1, 5)), k=k)
            labels = range(4)
            result = fuse_all(predictions, labels, k=k)
            expected = brute_force(predictions, labels, k)
            for label in labels:
                got = result[label]
                want = expected[label]
                assert [cid for cid, _ in got] == [cid for cid, _ in want]
                np.testing.assert_allclose([w for _, w in got], [w for _, w in want], rtol=1e-12)

    def test_label_without_predictions_maps_to_empty(self):
        result = fuse_all({"face": {0: plist(0, ("x", 0.9))}}, labels=[0, 1])
        assert result[1] == []
        assert result.ranked_ids(0) == ["x"]

    def test_default_universe_is_union_of_labels(self):
        result = fuse_all({"face": {0: plist(0, ("x", 0.9))}, "head": {2: plist(2, ("y", 0.4))}})
        assert result.labels == [0, 2]

    def test_truncates_to_k(self):
        entries = [(f"c{i:03d}", 1.0 - i / 200) for i in range(150)]
        result = fuse_all({"m": {0: plist(0, *entries)}})
        assert len(result[0]) == 100


# ---------------------------------------------------------------------------
# Part A / Part B merge
# ---------------------------------------------------------------------------

class TestMerge:

    @pytest.mark.parametrize("items, expected", [
        pytest.param([("a", 2.0), ("b", 1.0), ("c", 0.0)], [1.0, 0.5, 0.0], id="spread"),
        pytest.param([("a", 0.3)], [1.0], id="single"),
        pytest.param([("a", 0.3), ("b", 0.3)], [1.0, 1.0], id="flat"),
        pytest.param([], [], id="empty"),
    ])
    def test_min_max_normalize(self, items, expected):
        assert [s for _, s in min_max_normalize(items)] == pytest.approx(expected)

    def test_interleaves_sides_on_normalized_scale(self):
        part_a = RetrievalResult({0: [("a1", 0.9), ("a2", 0.5), ("a3", 0.1)]})
        part_b = RetrievalResult({0: [("b1", 3.0), ("b2", 1.0)]})
        merged = merge_results(part_a, part_b)
        # a1 1.0, b1 1.0, a2 0.5, a3 0.0, b2 0.0
        assert merged.ranked_ids(0) == ["a1", "b1", "a2", "a3", "b2"]

    def test_empty_side_keeps_other_order(self):
        part_a = RetrievalResult({0: [("a1", 0.9), ("a2", 0.5)], 1: []})
        merged = merge_results(part_a, RetrievalResult({}), labels=[0, 1])
        assert merged.ranked_ids(0) == ["a1", "a2"]
        assert merged[1] == []

    def test_truncates(self):
        part_a = RetrievalResult({0: [(f"a{i}", float(i)) for i in range(80)]})
        part_b = RetrievalResult({0: [(f"b{i}", float(i)) for i in range(80)]})
        assert len(merge_results(part_a, part_b, k=100)[0]) == 100
