"""Embedding-speed benchmarks and projection storage accounting.

Timing protocol: the projector is constructed once outside the timed
region (generation cost is deliberately excluded; only application is
measured), each repetition embeds a fresh pre-drawn dense vector, and the
median over repetitions is reported with the interquartile range as the
spread.  Warmup repetitions run first and are discarded.

Storage is a closed formula over the method's persistent state, not a
measurement of a live process.  Reported megabytes use 1 MB = 2^20 bytes;
matrix elements count as 32-bit floats, while the folded-circulant method
stores its seed row as float64 plus one sign bit per input coordinate and
regenerates the permutation from its 64-bit seed.
"""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass

import numpy as np

from . import rng
from .baselines import METHODS, largest_divisor_at_most_sqrt, make_projector
from .errors import ConfigError

MB = float(1 << 20)


@dataclass(frozen=True)
class BenchConfig:
    method: str
    n: int
    m: int
    repetitions: int = 25
    warmup: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.repetitions < 3:
            raise ConfigError(f"need at least 3 repetitions, got {self.repetitions}")
        if self.warmup < 3:
            raise ConfigError(f"need at least 3 warmup runs, got {self.warmup}")
        if self.n < 1 or self.m < 1:
            raise ConfigError("dimensions must be positive")


@dataclass(frozen=True)
class BenchResult:
    method: str
    n: int
    m: int
    median_s: float
    iqr_s: float
    repetitions: int


def time_embed(cfg: BenchConfig) -> BenchResult:
    projector = make_projector(cfg.method, cfg.n, cfg.m, cfg.rng_seed)
    vectors = rng.child_rng(cfg.rng_seed, rng.VECTORS).standard_normal((cfg.repetitions, cfg.n))
    for w in range(cfg.warmup):
        projector.embed(vectors[w % cfg.repetitions])
    times = np.empty(cfg.repetitions)
    # collector pauses otherwise land inside individual repetitions
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for i in range(cfg.repetitions):
            start = time.perf_counter()
            projector.embed(vectors[i])
            times[i] = time.perf_counter() - start
    finally:
        if gc_was_enabled:
            gc.enable()
    q25, q50, q75 = np.percentile(times, [25.0, 50.0, 75.0])
    return BenchResult(cfg.method, cfg.n, cfg.m, float(q50), float(q75 - q25), cfg.repetitions)


def sweep_m(method: str, n: int, m_values, repetitions: int = 25, warmup: int = 5,
            rng_seed: int = 0) -> list[BenchResult]:
    return [
        time_embed(BenchConfig(method, n, int(m), repetitions, warmup, rng_seed))
        for m in m_values
    ]


def powers_of_two(lo: int, hi: int) -> list[int]:
    if lo < 1 or hi < lo:
        raise ConfigError(f"need 1 <= lo <= hi, got {lo}:{hi}")
    out = []
    v = 1
    while v < lo:
        v *= 2
    while v <= hi:
        out.append(v)
        v *= 2
    if not out:
        raise ConfigError(f"no powers of two inside {lo}:{hi}")
    return out


def storage_bytes(method: str, n: int, m: int) -> int:
    """Bytes of persistent state for one projector, by closed formula.

    lsh: 4 m n (full float32 matrix).  cbe: 4 n (one float32 seed row; the
    flip bits ride along in the same O(n) budget).  bp: 4 (m1 n1 + m2 n2)
    with both factorizations from the near-sqrt divisor rule.  proposed:
    4 m seed floats + ceil(n/8) sign-bit bytes; the permutation costs only
    its 64-bit seed, which is what keeps this below cbe whenever m < n.
    """
    if n < 1 or m < 1:
        raise ConfigError("dimensions must be positive")
    if method == "lsh":
        return 4 * m * n
    if method == "cbe":
        return 4 * n
    if method == "bp":
        n1 = largest_divisor_at_most_sqrt(n)
        m1 = largest_divisor_at_most_sqrt(m)
        return 4 * (m1 * n1 + (m // m1) * (n // n1))
    if method == "proposed":
        return 4 * m + (n + 7) // 8
    raise ConfigError(f"method must be one of {METHODS}")


def storage_megabytes(method: str, n: int, m: int) -> float:
    return storage_bytes(method, n, m) / MB


def storage_table(n_values, m_values=None, methods=METHODS) -> list[dict]:
    """Rows (method, n, m, bytes, megabytes); m defaults to n per row."""
    rows = []
    for n in n_values:
        for m in (m_values if m_values else [n]):
            for method in methods:
                b = storage_bytes(method, int(n), int(m))
                rows.append({
                    "method": method,
                    "n": int(n),
                    "m": int(m),
                    "bytes": b,
                    "megabytes": b / MB,
                })
    return rows
