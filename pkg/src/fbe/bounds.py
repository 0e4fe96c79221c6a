"""Probability lower bounds for isometry of the fold-and-scramble stage.

The only source of norm distortion in the scramble-then-fold projection is
a collision: two or more nonzeros of the scrambled vector landing in the
same residue class mod m.  With a uniform permutation the support of the
scrambled vector is a uniform k-subset of {0..n-1}, so collision events are
pure counting problems over binomial coefficients.

Everything here is exact integer/rational arithmetic (``math.comb`` +
``fractions.Fraction``) with floats only at the boundary; the closed-form
relaxations and the i.i.d.-matrix concentration bound are evaluated in log
space so huge powers like (12/delta)^k never overflow.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, expm1, log, pi
from typing import NamedTuple

from .errors import ConfigError, SizeError

ENUMERATION_CAP = 10_000_000


class ExactBound(NamedTuple):
    rational: Fraction
    value: float


def _check_nmk(n: int, m: int, k: int) -> None:
    if m < 1 or n < m:
        raise ConfigError(f"need 1 <= m <= n, got n={n}, m={m}")
    if n % m != 0:
        raise ConfigError(f"m must divide n, got n={n}, m={m}")
    if not 1 <= k <= n:
        raise ConfigError(f"need 1 <= k <= n, got k={k}")


def _check_f(k: int, f: int) -> None:
    if not 1 <= f or 2 * f > k:
        raise ConfigError(f"need 1 <= f <= k/2, got f={f}, k={k}")


def concentration_lower_bound(k: int, m: int, delta: float) -> float:
    """Probability that an i.i.d. random projection keeps every k-sparse
    vector's squared norm within (1 +/- delta):

        1 - 2 (12/delta)^k exp(-(delta^2/16 - delta^3/48) m)

    clamped to [0, 1].  Evaluated as 1 - exp(t) with t computed in log
    space, so the clamp to zero is exact whenever t >= 0.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if k < 1 or m < 1:
        raise ConfigError(f"need positive k and m, got k={k}, m={m}")
    t = log(2.0) + k * (log(12.0) - log(delta)) - (delta**2 / 16.0 - delta**3 / 48.0) * m
    return 0.0 if t >= 0.0 else -expm1(t)


def collision_exact_bound(n: int, m: int, k: int, f: int) -> ExactBound:
    """Exact rational lower bound on P{fewer than f residue classes collide}:

        1 - C(m, f) * C(n/m, 2)^f * C(n - 2f, k - 2f) / C(n, k)

    clamped below at zero.
    """
    _check_nmk(n, m, k)
    _check_f(k, f)
    term = (
        Fraction(comb(m, f))
        * Fraction(comb(n // m, 2)) ** f
        * Fraction(comb(n - 2 * f, k - 2 * f), comb(n, k))
    )
    bound = max(Fraction(0), 1 - term)
    return ExactBound(bound, float(bound))


def collision_stirling_bound(n: int, m: int, k: int, f: int) -> float:
    """Stirling relaxation 1 - (2 pi f)^{-1/2} (e k^2 / (2 m f))^f, clamped.

    n only enters through the divisibility requirement; the relaxed form
    drops it (it is the large-n limit of the exact bound).
    """
    _check_nmk(n, m, k)
    _check_f(k, f)
    t = -0.5 * log(2.0 * pi * f) + f * (1.0 + 2.0 * log(k) - log(2.0 * m * f))
    return 0.0 if t >= 0.0 else -expm1(t)


def zero_distortion_bound(n: int, m: int, k: int) -> tuple[ExactBound, float]:
    """Lower bounds on the probability of zero distortion (no collisions).

    The f=1 specialization of the collision bound; returns the exact value
    and its Stirling relaxation.
    """
    _check_nmk(n, m, k)
    if k == 1:
        # a single nonzero can never collide
        return ExactBound(Fraction(1), 1.0), 1.0
    return collision_exact_bound(n, m, k, 1), collision_stirling_bound(n, m, k, 1)


@dataclass(frozen=True)
class BoundSpec:
    """Parameter bundle for the distortion-level bound curve.

    ``g`` is the worst-case number of colliding pairs a single residue
    class can contribute, C(n/m, 2); the admissible worst-case distortion
    levels for 0/1-valued k-sparse signals form the grid
    {2 g (f-1) / k : f = 1..k/2}.
    """

    n: int
    m: int
    k: int
    f: int

    def __post_init__(self):
        _check_nmk(self.n, self.m, self.k)
        _check_f(self.k, self.f)

    @property
    def g(self) -> int:
        return comb(self.n // self.m, 2)

    @property
    def delta(self) -> Fraction:
        return Fraction(2 * self.g * (self.f - 1), self.k)

    @property
    def delta_grid(self) -> list[Fraction]:
        g = self.g
        return [Fraction(2 * g * (f - 1), self.k) for f in range(1, self.k // 2 + 1)]

    def exact(self) -> ExactBound:
        return collision_exact_bound(self.n, self.m, self.k, self.f)

    def stirling(self) -> float:
        return collision_stirling_bound(self.n, self.m, self.k, self.f)


class BoundPoint(NamedTuple):
    f: int
    delta: Fraction
    exact: float
    stirling: float
    exact_rational: Fraction


def distortion_level_curve(n: int, m: int, k: int) -> list[BoundPoint]:
    """Per-distortion-level lower bounds for 0/1-valued k-sparse signals.

    Emits one point per f = 1..k/2 at distortion delta = 2 g (f-1) / k.
    Fewer-than-f collision events nest, so a bound proved for a smaller f
    is still valid at a larger one; a running maximum enforces the
    monotonicity the nesting guarantees.
    """
    _check_nmk(n, m, k)
    if k < 2:
        raise ConfigError(f"the distortion grid needs k >= 2, got k={k}")
    points: list[BoundPoint] = []
    best_exact = Fraction(0)
    best_stirling = 0.0
    for f in range(1, k // 2 + 1):
        spec = BoundSpec(n, m, k, f)
        best_exact = max(best_exact, spec.exact().rational)
        best_stirling = max(best_stirling, spec.stirling())
        points.append(
            BoundPoint(f, spec.delta, float(best_exact), best_stirling, best_exact)
        )
    return points


@dataclass(frozen=True)
class CollisionTally:
    """Exhaustive distribution of the number of colliding residue classes.

    ``counts[c]`` is how many k-subsets of {0..n-1} put c classes into
    collision (two or more support elements in the same class mod m).
    """

    n: int
    m: int
    k: int
    counts: dict[int, int]
    total: int

    def prob_exactly(self, c: int) -> Fraction:
        return Fraction(self.counts.get(c, 0), self.total)

    def prob_fewer_than(self, f: int) -> Fraction:
        """Exact P{number of colliding classes < f}."""
        return Fraction(sum(v for c, v in self.counts.items() if c < f), self.total)


def enumerate_collision_oracle(n: int, m: int, k: int, cap: int = ENUMERATION_CAP) -> CollisionTally:
    """Brute-force oracle: enumerate every k-subset and count collisions.

    The support of the scrambled vector is uniform over k-subsets, so these
    tallies are the exact event probabilities the closed-form bounds
    approximate from below.
    """
    _check_nmk(n, m, k)
    total = comb(n, k)
    if total > cap:
        raise SizeError(f"C({n},{k}) = {total} exceeds the enumeration cap {cap}")
    counts: Counter[int] = Counter()
    for support in combinations(range(n), k):
        residues = Counter(p % m for p in support)
        counts[sum(1 for v in residues.values() if v >= 2)] += 1
    return CollisionTally(n, m, k, dict(counts), total)
