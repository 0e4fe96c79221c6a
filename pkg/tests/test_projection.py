import numpy as np
import pytest

from fbe import (
    BinaryCode,
    CirculantProjector,
    ConfigError,
    Downsampler,
    Embedder,
    Randomizer,
    ShapeError,
    SizeError,
    materialize_projection,
)


def identity_randomizer(n):
    return Randomizer(n, 0, permutation=np.arange(n), signs=np.ones(n))


class TestRandomizer:
    def test_identity_case(self):
        r = identity_randomizer(3)
        assert np.array_equal(r.apply([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_zero_vector_fixed(self):
        r = Randomizer(16, 123)
        assert np.array_equal(r.apply(np.zeros(16)), np.zeros(16))

    def test_two_element_swap_with_signs(self):
        r = Randomizer(2, 0, permutation=[1, 0], signs=[-1.0, 1.0])
        # y[perm[i]] = signs[i] * x[i]: y[1] = -3, y[0] = +5
        assert np.array_equal(r.apply([3.0, 5.0]), [5.0, -3.0])

    def test_permutation_is_bijection_and_signs_unit(self):
        r = Randomizer(257, 99)
        assert np.array_equal(np.sort(r.permutation), np.arange(257))
        assert np.all(np.abs(r.signs) == 1.0)

    def test_same_seed_regenerates_identically(self):
        a, b = Randomizer(64, 5), Randomizer(64, 5)
        assert np.array_equal(a.permutation, b.permutation)
        assert np.array_equal(a.signs, b.signs)

    def test_norm_preserved_bit_exactly(self):
        gen = np.random.default_rng(0)
        for _ in range(25):
            n = int(gen.integers(1, 300))
            r = Randomizer(n, int(gen.integers(1 << 32)))
            x = gen.standard_normal(n)
            y = r.apply(x)
            # reorder + negate only: the multiset of magnitudes is untouched
            assert np.array_equal(np.sort(np.abs(y)), np.sort(np.abs(x)))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            Randomizer(4, 0).apply(np.zeros(5))

    def test_invalid_injections(self):
        with pytest.raises(ConfigError):
            Randomizer(3, 0, permutation=[0, 0, 2])
        with pytest.raises(ConfigError):
            Randomizer(3, 0, signs=[1.0, 2.0, -1.0])

    def test_batch_agrees_with_single(self):
        r = Randomizer(20, 17)
        x = np.random.default_rng(2).standard_normal((5, 20))
        batch = r.apply_batch(x)
        for row_in, row_out in zip(x, batch):
            assert np.array_equal(r.apply(row_in), row_out)


class TestDownsampler:
    def test_pairwise_fold(self):
        d = Downsampler(4, 2)
        assert np.array_equal(d.apply([1.0, 2.0, 3.0, 4.0]), [4.0, 6.0])

    def test_single_support_no_collision(self):
        d = Downsampler(6, 3)
        e0 = np.zeros(6)
        e0[0] = 1.0
        assert np.array_equal(d.apply(e0), [1.0, 0.0, 0.0])

    def test_all_ones_counts_classes(self):
        assert np.array_equal(Downsampler(6, 3).apply(np.ones(6)), [2.0, 2.0, 2.0])

    def test_divisibility_required(self):
        with pytest.raises(ConfigError):
            Downsampler(7, 3)

    def test_energy_bound(self):
        # folding n/m coordinates into one can grow energy at most n/m-fold
        gen = np.random.default_rng(4)
        for _ in range(25):
            m = int(gen.integers(1, 20))
            ratio = int(gen.integers(1, 8))
            d = Downsampler(m * ratio, m)
            y = gen.standard_normal(m * ratio)
            lhs = np.sum(d.apply(y) ** 2)
            assert lhs <= ratio * np.sum(y**2) + 1e-9


class TestCirculant:
    def test_identity_seed_is_identity(self):
        c = CirculantProjector([1.0, 0.0, 0.0, 0.0])
        v = np.array([4.0, -1.0, 2.0, 7.0])
        assert np.allclose(c.apply_fft(v), v, atol=1e-12)
        assert np.array_equal(c.apply_naive(v), v)

    def test_shift_seed_matches_materialized_matrix(self):
        c = CirculantProjector([0.0, 1.0, 0.0, 0.0, 0.0])
        v = np.random.default_rng(1).standard_normal(5)
        expected = c.matrix() @ v
        assert np.allclose(c.apply_fft(v), expected, atol=1e-12)

    def test_first_column_of_small_instance(self):
        c = CirculantProjector([1.0, 2.0, 3.0])
        # column 0 of the materialized matrix
        assert np.allclose(c.apply_naive([1.0, 0.0, 0.0]), [1.0, 3.0, 2.0])
        assert np.allclose(c.apply_fft([1.0, 0.0, 0.0]), [1.0, 3.0, 2.0], atol=1e-12)

    def test_two_by_two_closed_form(self):
        a, b, x, y = 1.5, -2.0, 0.5, 3.0
        c = CirculantProjector([a, b])
        assert np.allclose(c.apply_naive([x, y]), [a * x + b * y, b * x + a * y])

    def test_zero_vector(self):
        c = CirculantProjector.from_seed(16, 3)
        assert np.allclose(c.apply_fft(np.zeros(16)), np.zeros(16), atol=1e-14)

    def test_row_structure_is_cyclic_shift(self):
        c = CirculantProjector.from_seed(6, 11)
        mat = c.matrix()
        for i in range(6):
            assert np.array_equal(mat[i], np.roll(c.seed_vector, i))

    def test_spectrum_cache_matches_transform(self):
        c = CirculantProjector.from_seed(33, 8)
        ref = np.fft.fft(c.seed_vector)
        assert np.max(np.abs(c.seed_spectrum - ref)) <= 1e-12 * np.max(np.abs(ref))

    def test_fft_matches_naive_randomized(self):
        gen = np.random.default_rng(12)
        worst = 0.0
        for _ in range(200):
            m = int(gen.integers(2, 1025))
            c = CirculantProjector(gen.standard_normal(m))
            v = gen.uniform(-1.0, 1.0, m)
            worst = max(worst, float(np.max(np.abs(c.apply_fft(v) - c.apply_naive(v)))))
        assert worst < 1e-9

    def test_batch_agrees_with_single(self):
        c = CirculantProjector.from_seed(12, 5)
        v = np.random.default_rng(6).standard_normal((4, 12))
        batch = c.apply_fft_batch(v)
        for row_in, row_out in zip(v, batch):
            assert np.allclose(c.apply_fft(row_in), row_out, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            CirculantProjector.from_seed(8, 0).apply_fft(np.zeros(9))


class TestEmbedder:
    def test_zero_input_gives_all_ones_code(self):
        e = Embedder(12, 4, 9)
        assert e.embed(np.zeros(12)).bits().tolist() == [1, 1, 1, 1]

    def test_positive_scale_invariance(self):
        gen = np.random.default_rng(21)
        e = Embedder(40, 8, 2)
        for _ in range(20):
            x = gen.standard_normal(40)
            alpha = float(gen.uniform(0.01, 50.0))
            assert e.embed(x) == e.embed(alpha * x)

    def test_embed_matches_materialized_sign(self):
        gen = np.random.default_rng(33)
        for seed in range(10):
            n = int(gen.integers(2, 65))
            m = int(gen.integers(1, n + 1))
            e = Embedder(n, m, seed)
            A = materialize_projection(e)
            assert A.shape == (e.m, n)
            for _ in range(5):
                x = gen.standard_normal(n)
                assert e.embed(x) == BinaryCode.from_values(A @ x)

    def test_materialize_columns_are_basis_projections(self):
        e = Embedder(10, 5, 4)
        A = e.materialize()
        for j in range(10):
            basis = np.zeros(10)
            basis[j] = 1.0
            assert np.allclose(A[:, j], e.project(basis), atol=1e-12)

    def test_degenerate_identity_pipeline(self):
        n = 6
        e = Embedder(
            n, n, 0,
            randomizer=identity_randomizer(n),
            circulant=CirculantProjector(np.eye(n)[0]),
        )
        assert np.allclose(e.materialize(), np.eye(n), atol=1e-12)

    def test_fused_fold_matches_composed_stages(self):
        gen = np.random.default_rng(8)
        for n, m, seed in [(64, 16, 1), (100, 7, 2), (129, 13, 3), (4096, 256, 4)]:
            e = Embedder(n, m, seed)
            x = gen.standard_normal(n)
            assert np.allclose(e.project(x), e.project_composed(x), atol=1e-9)

    def test_nondivisible_input_is_zero_padded(self):
        e = Embedder(10, 4, 7)
        assert e.n_padded == 12
        x = np.random.default_rng(0).standard_normal(10)
        padded = np.concatenate([x, np.zeros(2)])
        direct = e.circulant.apply_fft(e.downsampler.apply(e.randomizer.apply(padded)))
        assert np.allclose(e.project(x), direct, atol=1e-12)

    def test_determinism_across_instances(self):
        x = np.random.default_rng(5).standard_normal(30)
        assert Embedder(30, 8, 77).embed(x) == Embedder(30, 8, 77).embed(x)

    def test_batch_matches_single(self):
        e = Embedder(50, 16, 3)
        x = np.random.default_rng(10).standard_normal((6, 50))
        words = e.embed_batch_words(x)
        for i in range(6):
            assert np.array_equal(words[i], e.embed(x[i]).words)

    def test_materialize_cap(self):
        with pytest.raises(SizeError):
            Embedder(1 << 12, 1 << 11, 0).materialize()

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            Embedder(8, 4, 0).embed(np.zeros(9))
