"""Monte-Carlo estimation of restricted-isometry distortion.

Per trial, a fresh projection and a fresh k-sparse signal are drawn and the
relative squared-norm distortion |(norm(Ax)/norm(x))^2 - 1| is recorded.
Two matrix families are supported:

* ``proposed``: the scramble-then-fold stage (permutation + sign flips,
  then residue-class summation).  The circulant output stage is excluded
  here; it is analyzed separately by the angle experiments.
* ``gaussian``: i.i.d. N(0, 1/m) entries.  Only the support columns ever
  touch a k-sparse input, so each trial draws an m x k column block; this
  is distributionally exact and avoids the m x n cost.

Trial t uses the derived seed (rng_seed, TRIAL, t), so results are
byte-identical for any worker count or execution order.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import ConfigError, ShapeError
from .projection import Downsampler, Randomizer

VALUE_MODELS = ("binary01", "gaussian")
MATRIX_KINDS = ("gaussian", "proposed")
DEFAULT_TRIALS = 100_000


@dataclass(frozen=True)
class SparseSignalSpec:
    """How to draw k-sparse test signals.

    ``binary01`` puts a 1 at each of k uniformly chosen positions;
    ``gaussian`` puts standard normal draws there instead.
    """

    n: int
    k: int
    value_model: str = "binary01"
    rng_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ConfigError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.value_model not in VALUE_MODELS:
            raise ConfigError(f"value_model must be one of {VALUE_MODELS}")
        rng.check_seed(self.rng_seed)

    def sample_with(self, gen: np.random.Generator) -> np.ndarray:
        x = np.zeros(self.n)
        support = gen.choice(self.n, size=self.k, replace=False)
        x[support] = 1.0 if self.value_model == "binary01" else gen.standard_normal(self.k)
        return x


def sample_sparse(spec: SparseSignalSpec, trial: int = 0) -> np.ndarray:
    """Draw the signal for a given trial index (deterministic per index)."""
    return spec.sample_with(rng.child_rng(spec.rng_seed, rng.TRIAL, trial))


def distortion(apply_projection, x) -> float:
    """Relative squared-norm distortion |(norm(Ax)^2 / norm(x)^2) - 1|."""
    x = np.asarray(x, dtype=np.float64)
    energy = float(x @ x)
    if energy == 0.0:
        raise ValueError("distortion is undefined for the zero vector")
    y = np.asarray(apply_projection(x), dtype=np.float64)
    return abs(float(y @ y) / energy - 1.0)


@dataclass(frozen=True)
class RipEstimate:
    """Aggregate of per-trial distortions plus the run's parameters."""

    matrix_kind: str
    n: int
    m: int
    k: int
    value_model: str
    rng_seed: int
    trials: int
    samples: np.ndarray = field(repr=False)
    mean_delta: float = field(init=False)

    def __post_init__(self):
        if self.samples.shape != (self.trials,):
            raise ShapeError("sample count must equal the trial count")
        self.samples.flags.writeable = False
        object.__setattr__(self, "mean_delta", float(self.samples.mean()))

    def cdf_points(self) -> list[tuple[float, float]]:
        """Empirical CDF as (t, P(delta <= t)) at each distinct sample value."""
        values, counts = np.unique(self.samples, return_counts=True)
        cum = np.cumsum(counts) / self.trials
        return [(float(v), float(p)) for v, p in zip(values, cum)]

    def cdf_at(self, t: float) -> float:
        return float(np.count_nonzero(self.samples <= t)) / self.trials

    def params(self) -> dict:
        return {
            "matrix_kind": self.matrix_kind,
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "value_model": self.value_model,
            "rng_seed": self.rng_seed,
            "trials": self.trials,
        }


def _proposed_trial(gen: np.random.Generator, spec: SparseSignalSpec, m: int) -> float:
    x = spec.sample_with(gen)
    permutation = gen.permutation(spec.n)
    signs = gen.integers(0, 2, spec.n) * 2.0 - 1.0
    scramble = Randomizer(spec.n, 0, permutation=permutation, signs=signs)
    fold = Downsampler(spec.n, m)
    return distortion(lambda v: fold.apply(scramble.apply(v)), x)


def _gaussian_trial(gen: np.random.Generator, spec: SparseSignalSpec, m: int) -> float:
    x = spec.sample_with(gen)
    support = np.flatnonzero(x)
    columns = gen.standard_normal((m, support.size)) / math.sqrt(m)
    return distortion(lambda v: columns @ v[support], x)


def _run_range(matrix_kind: str, n: int, m: int, k: int, value_model: str,
               rng_seed: int, start: int, stop: int) -> np.ndarray:
    spec = SparseSignalSpec(n, k, value_model, rng_seed)
    one = _proposed_trial if matrix_kind == "proposed" else _gaussian_trial
    out = np.empty(stop - start)
    for t in range(start, stop):
        out[t - start] = one(rng.child_rng(rng_seed, rng.TRIAL, t), spec, m)
    return out


def estimate_rip(matrix_kind: str, n: int, m: int, k: int, value_model: str = "binary01",
                 trials: int = DEFAULT_TRIALS, rng_seed: int = 0,
                 workers: int = 1) -> RipEstimate:
    """Estimate the distortion distribution over fresh matrices and signals.

    ``workers > 1`` splits the trial range over processes; per-trial seed
    derivation makes the aggregate identical regardless of the split.
    """
    if matrix_kind not in MATRIX_KINDS:
        raise ConfigError(f"matrix_kind must be one of {MATRIX_KINDS}")
    if trials < 1:
        raise ConfigError(f"need at least one trial, got {trials}")
    if matrix_kind == "proposed" and n % m != 0:
        raise ConfigError(f"the folded projection needs m | n, got n={n}, m={m}")
    SparseSignalSpec(n, k, value_model, rng_seed)  # validate early
    if m < 1 or n < m:
        raise ConfigError(f"need 1 <= m <= n, got n={n}, m={m}")

    args = (matrix_kind, n, m, k, value_model, rng_seed)
    if workers <= 1:
        samples = _run_range(*args, 0, trials)
    else:
        step = -(-trials // workers)
        ranges = [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_range, *zip(*[args + r for r in ranges])))
        samples = np.concatenate(chunks)
    return RipEstimate(matrix_kind, n, m, k, value_model, rng_seed, trials, samples)


def rip_histogram(estimate: RipEstimate, bins: int = 50) -> list[tuple[float, float, int]]:
    """Bin the distortion samples; returns (lo, hi, count) rows.

    For 0/1-valued signals under the folded projection the distortion
    distribution is discrete, so bin edges snap to multiples of the
    worst-case grid step 2 g / k and as many bins as the samples need are
    emitted (``bins`` is ignored).  Otherwise ``bins`` uniform bins cover
    [0, max].
    """
    if bins < 1:
        raise ConfigError(f"need at least one bin, got {bins}")
    if estimate.samples.size == 0:
        raise ShapeError("cannot histogram an empty estimate")
    top = float(estimate.samples.max())
    if estimate.value_model == "binary01" and estimate.matrix_kind == "proposed":
        step = 2.0 * math.comb(estimate.n // estimate.m, 2) / estimate.k
        if step == 0.0 or top == 0.0:
            return [(0.0, step if step > 0 else 1.0, int(estimate.trials))]
        nbins = int(np.floor(top / step + 1e-9)) + 1
        edges = step * np.arange(nbins + 1)
    else:
        edges = np.linspace(0.0, top if top > 0 else 1.0, bins + 1)
    counts, edges = np.histogram(estimate.samples, bins=edges)
    return [(float(lo), float(hi), int(c)) for lo, hi, c in zip(edges[:-1], edges[1:], counts)]
