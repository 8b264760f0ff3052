"""Distribution construction, the S/D decision rule, and store persistence."""

import json
import random

import numpy as np
import pytest

from styleverify.errors import (
    CorruptStoreError,
    MissingLabelClassError,
    NonFiniteInputError,
    VersionMismatchError,
)
from styleverify.verifier import (
    DistanceDistribution,
    build_from_distances,
    classify_distance,
    load,
    save,
    score,
)

HAND_STORE = build_from_distances([0.3, 0.2, 0.25], [0.7, 0.6, 0.65])


def brute_force_score(store, d_star):
    s = sum(1 for v in store.same_sorted if v > d_star) / store.same_sorted.size
    d = sum(1 for v in store.diff_sorted if v < d_star) / store.diff_sorted.size
    return s, d


class TestBuild:
    def test_lists_sorted(self):
        store = build_from_distances([0.3, 0.2], [0.7])
        assert store.same_sorted.tolist() == [0.2, 0.3]
        assert store.diff_sorted.tolist() == [0.7]

    def test_missing_label_class(self):
        with pytest.raises(MissingLabelClassError):
            build_from_distances([], [0.5])
        with pytest.raises(MissingLabelClassError):
            build_from_distances([0.5], [])

    def test_counts_recorded(self):
        store = build_from_distances([0.1] * 7, [0.9] * 5)
        assert store.meta.n_same == 7
        assert store.meta.n_diff == 5

    def test_negative_distance_rejected(self):
        with pytest.raises(NonFiniteInputError):
            build_from_distances([-0.1], [0.5])

    def test_build_deterministic_store_bytes(self, tmp_path):
        rng = random.Random(1)
        same = [rng.random() for _ in range(100)]
        diff = [rng.random() + 1 for _ in range(100)]
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save(build_from_distances(same, diff), p1)
        save(build_from_distances(same, diff), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestScore:
    def test_hand_constructed_example(self):
        # brute force over all six stored distances fixes (S, D) = (1/3, 0)
        assert brute_force_score(HAND_STORE, 0.25) == (pytest.approx(1 / 3), 0.0)
        s, d = score(HAND_STORE, 0.25)
        assert s == pytest.approx(1 / 3)
        assert d == 0.0

    def test_extreme_left(self):
        s, d = score(HAND_STORE, 0.1)
        assert (s, d) == (1.0, 0.0)

    def test_extreme_right(self):
        s, d = score(HAND_STORE, 0.9)
        assert (s, d) == (0.0, 1.0)

    def test_stored_value_excluded_by_strict_inequality(self):
        s_at, _ = score(HAND_STORE, 0.3)
        assert s_at == 0.0  # 0.3 itself does not count as "> 0.3"
        _, d_at = score(HAND_STORE, 0.6)
        assert d_at == 0.0  # 0.6 itself does not count as "< 0.6"

    def test_non_finite_query_rejected(self):
        with pytest.raises(NonFiniteInputError):
            score(HAND_STORE, float("nan"))

    def test_binary_search_equals_brute_force(self):
        rng = random.Random(11)
        store = build_from_distances(
            [rng.uniform(0, 1) for _ in range(1000)],
            [rng.uniform(0.3, 1.5) for _ in range(800)],
        )
        queries = [rng.uniform(-0.2, 1.8) for _ in range(500)]
        queries += [float(v) for v in store.same_sorted[:50]]  # exact hits
        for q in queries:
            assert score(store, q) == brute_force_score(store, q)

    def test_monotonicity(self):
        rng = random.Random(12)
        store = build_from_distances(
            [rng.random() for _ in range(300)],
            [rng.random() + 0.5 for _ in range(300)],
        )
        grid = sorted(rng.uniform(-0.5, 2.0) for _ in range(200))
        scores = [score(store, q) for q in grid]
        for (s1, d1), (s2, d2) in zip(scores, scores[1:]):
            assert s1 >= s2  # S non-increasing in d*
            assert d1 <= d2  # D non-decreasing in d*


class TestClassify:
    def test_hand_example_verdict(self):
        v = classify_distance(HAND_STORE, 0.25)
        assert v.predicted == "same_author"
        assert v.s_prob == pytest.approx(1 / 3)
        assert v.d_prob == 0.0
        assert v.confidence == pytest.approx(1.0)
        assert v.distance == 0.25

    def test_tie_goes_to_different_author(self):
        store = build_from_distances([0.4, 0.6], [0.4, 0.6])
        v = classify_distance(store, 0.5)  # S = D = 0.5
        assert v.s_prob == v.d_prob == 0.5
        assert v.predicted == "different_author"
        assert v.confidence == 0.0

    def test_zero_zero_convention(self):
        store = build_from_distances([0.5], [0.5])
        v = classify_distance(store, 0.5)  # strict inequalities exclude both
        assert v.s_prob == v.d_prob == 0.0
        assert v.predicted == "different_author"
        assert v.confidence == 0.0

    def test_confidence_bounds_and_one_sided_certainty(self):
        rng = random.Random(13)
        store = build_from_distances(
            [rng.random() for _ in range(100)],
            [rng.random() + 1.2 for _ in range(100)],
        )
        for _ in range(500):
            v = classify_distance(store, rng.uniform(-0.5, 3.0))
            assert 0.0 <= v.confidence <= 1.0
            one_sided = (v.s_prob == 0.0) != (v.d_prob == 0.0)
            if one_sided:
                assert v.confidence == 1.0

    def test_separation_sanity(self):
        # with fully separated supports, queries inside the same-author
        # support classify same, queries past it classify different; the
        # strict inequalities send the empty gap (S = D = 0) to different
        store = build_from_distances([0.1, 0.2, 0.3], [0.6, 0.7, 0.8])
        assert float(store.same_sorted.max()) < float(store.diff_sorted.min())
        rng = random.Random(14)
        for _ in range(200):
            below = rng.uniform(0.0, 0.2999)
            assert classify_distance(store, below).predicted == "same_author"
            above = rng.uniform(0.3001, 2.0)
            assert classify_distance(store, above).predicted == "different_author"


class TestPersistence:
    def test_round_trip_identical_verdicts(self, tmp_path):
        rng = random.Random(15)
        store = build_from_distances(
            [rng.random() for _ in range(500)],
            [rng.random() + 0.4 for _ in range(500)],
            vocab_hash="abc123",
            alpha=0.5,
        )
        path = tmp_path / "store.json"
        save(store, path)
        loaded = load(path)
        assert loaded.same_sorted.tolist() == store.same_sorted.tolist()
        assert loaded.diff_sorted.tolist() == store.diff_sorted.tolist()
        assert loaded.meta.alpha == 0.5
        for _ in range(200):
            q = rng.uniform(-0.2, 1.8)
            assert classify_distance(loaded, q) == classify_distance(store, q)

    def test_truncated_file_detected(self, tmp_path):
        path = tmp_path / "store.json"
        save(HAND_STORE, path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) - 10])
        with pytest.raises(CorruptStoreError):
            load(path)

    def test_flipped_byte_detected(self, tmp_path):
        path = tmp_path / "store.json"
        save(HAND_STORE, path)
        raw = bytearray(path.read_bytes())
        idx = raw.index(b"0.25")  # corrupt a stored distance digit
        raw[idx + 2] = ord("9")
        path.write_bytes(bytes(raw))
        with pytest.raises(CorruptStoreError):
            load(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "store.json"
        save(HAND_STORE, path)
        envelope = json.loads(path.read_text())
        envelope["version"] = 99
        path.write_text(json.dumps(envelope))
        with pytest.raises(VersionMismatchError):
            load(path)

    def test_vocab_hash_mismatch_warns(self, tmp_path):
        path = tmp_path / "store.json"
        store = build_from_distances([0.1], [0.9], vocab_hash="aaaa1111")
        save(store, path)
        with pytest.warns(UserWarning, match="vocabulary"):
            load(path, expected_vocab_hash="bbbb2222")

    def test_matching_vocab_hash_is_silent(self, tmp_path):
        path = tmp_path / "store.json"
        store = build_from_distances([0.1], [0.9], vocab_hash="aaaa1111")
        save(store, path)
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            load(path, expected_vocab_hash="aaaa1111")

    def test_unsorted_store_rejected(self):
        with pytest.raises(CorruptStoreError):
            DistanceDistribution(
                same_sorted=np.array([0.3, 0.1]), diff_sorted=np.array([0.5]))
