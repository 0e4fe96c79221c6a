"""Angle preservation and Hamming-space retrieval experiments.

For sign-of-Gaussian-projection codes the normalized Hamming distance
between two inputs concentrates on theta / pi (theta the angle between
them) with variance theta (pi - theta) / (m pi^2); the experiments here
measure how closely each embedding family tracks that law, and how well
Hamming ranking reproduces true-angle ranking on a synthetic clustered
corpus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .baselines import make_projector
from .bincode import BinaryCode, hamming_distance, hamming_matrix
from .errors import ConfigError, ShapeError


def hamming_normalized(a: BinaryCode, b: BinaryCode) -> float:
    """Fraction of differing bits, in [0, 1]."""
    return hamming_distance(a, b) / a.m


def angle_between(x1, x2) -> float:
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    n1, n2 = np.linalg.norm(x1), np.linalg.norm(x2)
    if n1 == 0.0 or n2 == 0.0:
        raise ValueError("angle is undefined for zero vectors")
    return float(np.arccos(np.clip(x1 @ x2 / (n1 * n2), -1.0, 1.0)))


@dataclass(frozen=True)
class AnglePair:
    """Two nonzero vectors at a known angle."""

    x1: np.ndarray
    x2: np.ndarray
    theta: float

    def realized_angle(self) -> float:
        return angle_between(self.x1, self.x2)


def make_angle_pair(n: int, theta: float, sparsity: int | None = None,
                    rng_seed: int = 0) -> AnglePair:
    """Construct a vector pair at exactly the requested angle.

    x1 is random (k-sparse when ``sparsity`` is given, dense otherwise);
    x2 = cos(theta) x1/|x1| + sin(theta) u with u a unit vector orthogonal
    to x1 drawn from the same support, so both vectors share one sparsity
    pattern.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    gen = rng.child_rng(rng_seed, rng.PAIR)
    if sparsity is None:
        if n < 2:
            raise ConfigError("need n >= 2 to realize a nontrivial angle")
        support = np.arange(n)
    else:
        if not 1 <= sparsity <= n:
            raise ConfigError(f"need 1 <= sparsity <= n, got {sparsity}")
        if sparsity < 2 and theta not in (0.0, math.pi):
            raise ConfigError("a 1-sparse pair can only realize angles 0 or pi")
        support = np.sort(gen.choice(n, size=sparsity, replace=False))

    x1 = np.zeros(n)
    x1[support] = gen.standard_normal(support.size)
    unit1 = x1 / np.linalg.norm(x1)
    if theta in (0.0, math.pi):
        # no orthogonal component exists (1-sparse) or is needed
        return AnglePair(x1, math.cos(theta) * unit1, theta)
    # orthonormalize a second draw against x1 inside the shared support
    u = np.zeros(n)
    while True:
        u[:] = 0.0
        u[support] = gen.standard_normal(support.size)
        u -= (u @ unit1) * unit1
        norm = np.linalg.norm(u)
        if norm > 1e-8:
            break
    u /= norm
    x2 = math.cos(theta) * unit1 + math.sin(theta) * u
    return AnglePair(x1, x2, theta)


@dataclass(frozen=True)
class HammingStats:
    """Sample moments of the normalized Hamming distance at one angle."""

    mean_h: float
    var_h: float
    replicates: int

    def __post_init__(self):
        if not 0.0 <= self.mean_h <= 1.0 or self.var_h < 0.0:
            raise ValueError("mean must lie in [0,1] and variance be nonnegative")


def predicted_mean(theta: float) -> float:
    return theta / math.pi


def predicted_var(theta: float, m: int) -> float:
    return theta * (math.pi - theta) / (m * math.pi**2)


def charikar_experiment(embedder_kind: str, n: int, m: int, theta_grid,
                        replicates: int, rng_seed: int = 0,
                        sparsity: int | None = None) -> list[tuple[float, HammingStats]]:
    """Measure normalized Hamming distance statistics per angle.

    A fresh projector is drawn for every replicate (the distance law's
    variance is over the random projection), and a fresh pair per
    (angle, replicate).  One projector is shared across the angle grid
    within a replicate; angles are still independent draws.
    """
    thetas = [float(t) for t in theta_grid]
    if not thetas:
        raise ConfigError("theta grid must be non-empty")
    if any(not 0.0 < t < math.pi for t in thetas):
        raise ValueError("all angles must lie strictly inside (0, pi)")
    if replicates < 2:
        raise ConfigError("need at least two replicates for a sample variance")

    h = np.empty((len(thetas), replicates))
    for r in range(replicates):
        projector = make_projector(embedder_kind, n, m, rng.derive_seed(rng_seed, rng.REPLICATE, r))
        for i, theta in enumerate(thetas):
            pair = make_angle_pair(n, theta, sparsity, rng.derive_seed(rng_seed, rng.PAIR, i, r))
            codes = projector.embed_batch_words(np.stack([pair.x1, pair.x2]))
            h[i, r] = hamming_matrix(codes[:1], codes[1:])[0, 0] / m
    return [
        (theta, HammingStats(float(row.mean()), float(row.var(ddof=1)), replicates))
        for theta, row in zip(thetas, h)
    ]


def map_at_k(rankings, k: int) -> float:
    """Mean average precision at cutoff k over per-query ranked relevance lists.

    Each ranking is the relevance (1/0) of retrieved items in rank order;
    AP truncates precision terms at k and divides by min(k, total relevant
    in the list).  Queries with no relevant items score 0.
    """
    rankings = list(rankings)
    if not rankings:
        raise ShapeError("need at least one query ranking")
    if k < 1:
        raise ConfigError(f"cutoff must be positive, got {k}")
    aps = []
    for ranking in rankings:
        rel = np.asarray(ranking, dtype=np.float64)
        if rel.ndim != 1 or rel.size < k:
            raise ShapeError(f"each ranking needs length >= {k}")
        denom = min(k, int(rel.sum()))
        if denom == 0:
            aps.append(0.0)
            continue
        head = rel[:k]
        precision = np.cumsum(head) / np.arange(1, k + 1)
        aps.append(float((precision * head).sum() / denom))
    return float(np.mean(aps))


@dataclass(frozen=True)
class RetrievalResult:
    map_at_k: float
    k: int
    queries: int

    def __post_init__(self):
        if not 0.0 <= self.map_at_k <= 1.0:
            raise ValueError("mAP must lie in [0, 1]")


@dataclass(frozen=True)
class ClusterSpec:
    """Synthetic clustered sparse corpus: k-sparse unit centers plus small
    sparse perturbations; the cluster label is the retrieval ground truth."""

    clusters: int = 10
    center_sparsity: int = 32
    noise_sparsity: int = 16
    noise_scale: float = 0.85

    def __post_init__(self):
        if self.clusters < 2:
            raise ConfigError("need at least two clusters")
        if self.center_sparsity < 1 or self.noise_sparsity < 1:
            raise ConfigError("sparsities must be positive")
        if not 0.0 < self.noise_scale < 1.0:
            raise ConfigError("noise scale must lie in (0, 1)")


def make_clustered_corpus(n: int, corpus_size: int, spec: ClusterSpec,
                          rng_seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Returns (corpus matrix, integer labels); items cycle through clusters."""
    if corpus_size < spec.clusters:
        raise ConfigError("corpus must contain at least one item per cluster")
    if n < spec.center_sparsity or n < spec.noise_sparsity:
        raise ConfigError("sparsities cannot exceed the dimension")
    gen = rng.child_rng(rng_seed, rng.CORPUS)
    centers = np.zeros((spec.clusters, n))
    for c in range(spec.clusters):
        support = gen.choice(n, size=spec.center_sparsity, replace=False)
        values = gen.standard_normal(spec.center_sparsity)
        centers[c, support] = values / np.linalg.norm(values)
    labels = np.arange(corpus_size) % spec.clusters
    corpus = centers[labels].copy()
    for i in range(corpus_size):
        support = gen.choice(n, size=spec.noise_sparsity, replace=False)
        noise = gen.standard_normal(spec.noise_sparsity)
        corpus[i, support] += spec.noise_scale * noise / np.linalg.norm(noise)
    return corpus, labels


def synthetic_retrieval(embedder_kind: str, n: int, m: int, corpus_size: int,
                        queries: int, top_k: int, cluster_spec: ClusterSpec | None = None,
                        rng_seed: int = 0) -> RetrievalResult:
    """Rank a synthetic corpus by Hamming distance and score mAP at top_k.

    The corpus, labels and query choice depend only on ``rng_seed`` (not on
    the method), so different methods under one seed face the identical
    task; one fixed projection serves the whole run, as in deployment.
    """
    spec = cluster_spec if cluster_spec is not None else ClusterSpec()
    if corpus_size < top_k + 1:
        raise ConfigError("corpus must be larger than the cutoff")
    if not 1 <= queries <= corpus_size:
        raise ConfigError(f"need 1 <= queries <= corpus size, got {queries}")

    corpus, labels = make_clustered_corpus(n, corpus_size, spec, rng_seed)
    query_idx = np.sort(rng.child_rng(rng_seed, rng.QUERY).choice(corpus_size, size=queries, replace=False))

    projector = make_projector(embedder_kind, n, m, rng.derive_seed(rng_seed, rng.PROJECTOR))
    words = projector.embed_batch_words(corpus)
    distances = hamming_matrix(words[query_idx], words)

    rankings = []
    for row, q in zip(distances, query_idx):
        order = np.lexsort((np.arange(corpus_size), row))
        order = order[order != q]  # never return the query itself
        rankings.append((labels[order] == labels[q]).astype(np.int8))
    return RetrievalResult(map_at_k(rankings, top_k), top_k, queries)
