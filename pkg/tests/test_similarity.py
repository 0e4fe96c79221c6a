import math

import numpy as np
import pytest

from fbe import (
    BinaryCode,
    ClusterSpec,
    ConfigError,
    ShapeError,
    charikar_experiment,
    hamming_normalized,
    make_angle_pair,
    map_at_k,
    synthetic_retrieval,
)
from fbe.similarity import angle_between, make_clustered_corpus, predicted_var


class TestHammingNormalized:
    def test_identical_codes(self):
        c = BinaryCode.from_bits([1, 0, 1, 1, 0, 0, 1, 0])
        assert hamming_normalized(c, c) == 0.0

    def test_complement_is_one(self):
        c = BinaryCode.from_bits([1, 0, 1, 1, 0, 0, 1, 0])
        assert hamming_normalized(c, ~c) == 1.0

    def test_two_of_eight(self):
        a = BinaryCode.from_bits([1, 0, 1, 1, 0, 0, 0, 0])
        b = BinaryCode.from_bits([1, 1, 1, 0, 0, 0, 0, 0])
        assert hamming_normalized(a, b) == 0.25

    def test_metric_properties_on_random_triples(self):
        gen = np.random.default_rng(0)
        for _ in range(60):
            a, b, c = (BinaryCode.from_values(gen.standard_normal(33)) for _ in range(3))
            dab = hamming_normalized(a, b)
            assert dab == hamming_normalized(b, a)
            assert (dab == 0.0) == (a == b)
            assert dab <= hamming_normalized(a, c) + hamming_normalized(c, b) + 1e-15


class TestAnglePair:
    def test_requested_angle_realized(self):
        for theta in (1e-4, 0.3, math.pi / 2, 2.5, math.pi - 1e-4):
            for sparsity in (None, 8):
                pair = make_angle_pair(64, theta, sparsity, rng_seed=3)
                assert abs(pair.realized_angle() - theta) < 1e-10

    def test_parallel_at_zero(self):
        pair = make_angle_pair(16, 0.0, rng_seed=1)
        assert abs(angle_between(pair.x1, pair.x2)) < 1e-10

    def test_orthogonal_at_right_angle(self):
        pair = make_angle_pair(32, math.pi / 2, rng_seed=2)
        x1 = pair.x1 / np.linalg.norm(pair.x1)
        assert abs(x1 @ pair.x2) < 1e-12

    def test_sparse_pairs_share_support(self):
        pair = make_angle_pair(100, 0.7, sparsity=9, rng_seed=5)
        assert np.count_nonzero(pair.x1) <= 9
        assert set(np.flatnonzero(pair.x2)) <= set(np.flatnonzero(pair.x1))

    def test_infeasible_sparsity(self):
        with pytest.raises(ConfigError):
            make_angle_pair(10, 0.5, sparsity=1)

    def test_one_sparse_degenerate_angles(self):
        assert make_angle_pair(10, 0.0, sparsity=1, rng_seed=1).realized_angle() == 0.0
        assert make_angle_pair(10, math.pi, sparsity=1, rng_seed=1).realized_angle() == math.pi

    def test_angle_domain(self):
        with pytest.raises(ValueError):
            make_angle_pair(10, -0.1)


class TestCharikar:
    def test_lsh_tracks_line_small(self):
        thetas = [math.pi / 4, math.pi / 2]
        results = charikar_experiment("lsh", 64, 256, thetas, replicates=200, rng_seed=7)
        for theta, s in results:
            assert abs(s.mean_h - theta / math.pi) < 0.03
            assert s.replicates == 200

    def test_variance_matches_formula_scale(self):
        theta = math.pi / 4
        assert predicted_var(theta, 1000) == pytest.approx(1.875e-4, rel=1e-3)
        results = charikar_experiment("lsh", 64, 1000, [theta], replicates=400, rng_seed=8)
        _, s = results[0]
        assert 0.5 * predicted_var(theta, 1000) < s.var_h < 2.0 * predicted_var(theta, 1000)

    def test_near_zero_angle_near_zero_distance(self):
        results = charikar_experiment("lsh", 32, 128, [1e-6], replicates=50, rng_seed=9)
        _, s = results[0]
        assert s.mean_h < 1e-3
        assert s.var_h < 1e-6

    def test_angle_domain_validated(self):
        with pytest.raises(ValueError):
            charikar_experiment("lsh", 16, 8, [0.0], replicates=10, rng_seed=0)

    def test_sparse_arm_tracks_line_at_moderate_width(self):
        # k <= sqrt(m) keeps fold collisions rare enough for the line to hold
        thetas = [math.pi / 4, math.pi / 2]
        results = charikar_experiment("proposed", 1024, 256, thetas,
                                      replicates=400, rng_seed=10, sparsity=16)
        for theta, s in results:
            assert abs(s.mean_h - theta / math.pi) < 0.02

    def test_deterministic(self):
        a = charikar_experiment("proposed", 64, 32, [0.5], replicates=20, rng_seed=4, sparsity=5)
        b = charikar_experiment("proposed", 64, 32, [0.5], replicates=20, rng_seed=4, sparsity=5)
        assert a == b


class TestMapAtK:
    def test_all_relevant(self):
        assert map_at_k([[1, 1, 1]], 3) == 1.0

    def test_none_relevant(self):
        assert map_at_k([[0, 0, 0]], 3) == 0.0

    def test_hand_computed_pattern(self):
        assert map_at_k([[1, 0, 1]], 3) == pytest.approx(5 / 6)

    def test_mean_over_queries(self):
        assert map_at_k([[1, 1], [0, 0]], 2) == pytest.approx(0.5)

    def test_depends_only_on_pattern_and_total(self):
        # item identity is irrelevant: any tail with the same number of
        # relevant items yields the same truncated AP
        head = [1, 0, 1]
        assert map_at_k([head + [1, 0, 0]], 3) == map_at_k([head + [0, 0, 1]], 3)

    def test_promoting_a_relevant_item_never_hurts(self):
        gen = np.random.default_rng(11)
        for _ in range(50):
            rel = gen.integers(0, 2, 12).tolist()
            base = map_at_k([rel], 8)
            idx = [i for i in range(11) if rel[i] == 0 and rel[i + 1] == 1]
            if not idx:
                continue
            i = idx[0]
            swapped = rel.copy()
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            assert map_at_k([swapped], 8) >= base - 1e-12

    def test_input_validation(self):
        with pytest.raises(ShapeError):
            map_at_k([], 3)
        with pytest.raises(ShapeError):
            map_at_k([[1, 0]], 3)


class TestRetrieval:
    def test_corpus_is_method_independent(self):
        a, _ = make_clustered_corpus(128, 40, ClusterSpec(clusters=4, center_sparsity=8,
                                                          noise_sparsity=4), rng_seed=5)
        b, _ = make_clustered_corpus(128, 40, ClusterSpec(clusters=4, center_sparsity=8,
                                                          noise_sparsity=4), rng_seed=5)
        assert np.array_equal(a, b)

    def test_large_codes_approach_true_angle_ranking(self):
        spec = ClusterSpec(clusters=4, center_sparsity=8, noise_sparsity=4, noise_scale=0.5)
        res = synthetic_retrieval("proposed", 256, 256, 200, 30, 10, spec, rng_seed=6)
        assert res.map_at_k > 0.9
        assert res.k == 10 and res.queries == 30

    def test_everything_relevant_gives_one(self):
        spec = ClusterSpec(clusters=2, center_sparsity=4, noise_sparsity=2, noise_scale=0.05)
        # two tight, far-apart clusters: top-5 of 50 per query is all same-cluster
        res = synthetic_retrieval("lsh", 128, 512, 50, 10, 5, spec, rng_seed=7)
        assert res.map_at_k == 1.0

    def test_deterministic(self):
        spec = ClusterSpec(clusters=3, center_sparsity=6, noise_sparsity=3)
        a = synthetic_retrieval("proposed", 128, 64, 60, 10, 5, spec, rng_seed=8)
        b = synthetic_retrieval("proposed", 128, 64, 60, 10, 5, spec, rng_seed=8)
        assert a == b

    def test_degenerate_spec_rejected(self):
        with pytest.raises(ConfigError):
            ClusterSpec(clusters=1)
        with pytest.raises(ConfigError):
            synthetic_retrieval("lsh", 64, 16, 10, 20, 5, ClusterSpec(), rng_seed=0)
