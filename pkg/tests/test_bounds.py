from fractions import Fraction
from math import comb

import mpmath
import pytest

from fbe import (
    BoundSpec,
    ConfigError,
    SizeError,
    collision_exact_bound,
    collision_stirling_bound,
    concentration_lower_bound,
    distortion_level_curve,
    enumerate_collision_oracle,
    zero_distortion_bound,
)


def mp_concentration(k, m, delta):
    """Direct extended-precision evaluation, clamped like the implementation."""
    with mpmath.workdps(80):
        d = mpmath.mpf(delta)
        raw = 1 - 2 * (12 / d) ** k * mpmath.exp(-(d**2 / 16 - d**3 / 48) * m)
        return max(mpmath.mpf(0), raw)


class TestConcentrationBound:
    def test_tiny_delta_clamps_to_zero(self):
        assert concentration_lower_bound(5, 100, 1e-9) == 0.0
        assert concentration_lower_bound(10, 1000, 0.3) == 0.0
        assert mp_concentration(10, 1000, 0.3) == 0

    def test_large_m_approaches_one(self):
        assert concentration_lower_bound(10, 10**6, 0.5) > 1 - 1e-12

    def test_log_space_matches_extended_precision(self):
        # parameters chosen so the bound is strictly inside (0, 1)
        for k, m, delta in [(10, 7700, 0.3), (5, 2500, 0.4), (20, 36000, 0.2)]:
            ours = concentration_lower_bound(k, m, delta)
            ref = float(mp_concentration(k, m, delta))
            assert 0.0 < ours < 1.0
            assert ours == pytest.approx(ref, rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            concentration_lower_bound(10, 100, 0.0)
        with pytest.raises(ValueError):
            concentration_lower_bound(10, 100, 1.0)


class TestCollisionExactBound:
    def test_small_instance_is_tight(self):
        bound = collision_exact_bound(8, 4, 2, 1)
        assert bound.rational == Fraction(6, 7)
        # the brute-force tally says exactly 4 of 28 supports collide
        tally = enumerate_collision_oracle(8, 4, 2)
        assert tally.prob_fewer_than(1) == Fraction(6, 7)

    def test_desk_scale_value(self):
        bound = collision_exact_bound(4000, 1000, 10, 1)
        direct = 1 - Fraction(1000 * 6 * comb(3998, 8), comb(4000, 10))
        assert bound.rational == direct
        assert bound.value == pytest.approx(0.9662415603900976, abs=1e-12)

    def test_clamps_to_zero_when_term_exceeds_one(self):
        bound = collision_exact_bound(4000, 1000, 100, 1)
        assert bound.rational == 0
        assert bound.value == 0.0

    def test_domain(self):
        with pytest.raises(ConfigError):
            collision_exact_bound(10, 3, 4, 1)  # m does not divide n
        with pytest.raises(ConfigError):
            collision_exact_bound(8, 4, 2, 2)  # 2f > k


class TestCollisionStirlingBound:
    def test_clamped_case(self):
        # e*100^2/2000 = 13.59 -> raw bound negative -> 0
        assert collision_stirling_bound(4000, 1000, 100, 1) == 0.0

    def test_moderate_case(self):
        val = collision_stirling_bound(4000, 1000, 10, 1)
        assert val == pytest.approx(0.9457781224290386, abs=1e-12)

    def test_limit_toward_one(self):
        assert collision_stirling_bound(4000, 1000, 4, 2) > 0.999

    def test_huge_exponent_does_not_overflow(self):
        assert collision_stirling_bound(4000, 125, 400, 160) == 0.0


class TestZeroDistortionBound:
    def test_small_instance(self):
        exact, stirling = zero_distortion_bound(8, 4, 2)
        assert exact.rational == Fraction(6, 7)
        assert 0.0 <= stirling <= 1.0

    def test_single_nonzero_never_collides(self):
        exact, stirling = zero_distortion_bound(8, 4, 1)
        assert exact.rational == 1
        assert stirling == 1.0

    def test_sqrt_m_sparsity_value(self):
        _, stirling = zero_distortion_bound(4000, 1000, 31)
        assert stirling == pytest.approx(0.479, abs=1e-3)


class TestDistortionLevelCurve:
    def test_grid_geometry(self):
        spec = BoundSpec(4000, 1000, 100, 1)
        assert spec.g == 6
        grid = spec.delta_grid
        assert len(grid) == 50
        assert grid[0] == 0 and grid[1] == Fraction(12, 100) and grid[2] == Fraction(24, 100)

    def test_first_point_equals_zero_distortion_bound(self):
        curve = distortion_level_curve(4000, 1000, 10)
        exact, stirling = zero_distortion_bound(4000, 1000, 10)
        assert curve[0].delta == 0
        assert curve[0].exact == exact.value
        assert curve[0].stirling == stirling

    def test_monotone_nondecreasing_after_clamp(self):
        for n, m, k in [(4000, 1000, 100), (4000, 125, 40), (60, 12, 10)]:
            curve = distortion_level_curve(n, m, k)
            exacts = [p.exact for p in curve]
            stirlings = [p.stirling for p in curve]
            assert exacts == sorted(exacts)
            assert stirlings == sorted(stirlings)

    def test_relaxed_tracks_exact_at_scale(self):
        # with n large at fixed k^2/m the two forms agree to within the
        # structural slack of the relaxation (largest at f=1)
        for f, slack in [(1, 1e-2), (2, 1e-4), (3, 1e-6)]:
            exact = collision_exact_bound(40000, 10000, 10, f).value
            stirling = collision_stirling_bound(40000, 10000, 10, f)
            assert abs(exact - stirling) < slack


class TestEnumerationOracle:
    def test_probabilities_sum_to_one(self):
        tally = enumerate_collision_oracle(8, 4, 3)
        assert sum(tally.counts.values()) == tally.total == comb(8, 3)

    def test_single_nonzero(self):
        tally = enumerate_collision_oracle(6, 3, 1)
        assert tally.prob_fewer_than(1) == 1

    def test_exact_probability_dominates_bound_for_every_f(self):
        for n, m, k in [(8, 4, 2), (6, 3, 3), (12, 4, 4), (10, 5, 4)]:
            tally = enumerate_collision_oracle(n, m, k)
            for f in range(1, k // 2 + 1):
                assert tally.prob_fewer_than(f) >= collision_exact_bound(n, m, k, f).rational

    def test_cap_enforced(self):
        with pytest.raises(SizeError):
            enumerate_collision_oracle(4000, 1000, 10)
