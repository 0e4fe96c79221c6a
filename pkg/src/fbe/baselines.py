"""Reference embeddings: full Gaussian projection (LSH), circulant-only
projection at full input size (CBE-rand), and bilinear projection (BP-rand).

All three expose the same surface as :class:`fbe.projection.Embedder`
(``project`` / ``embed`` / ``embed_batch_words``), are immutable after
construction, and regenerate deterministically from their seed.
"""

from __future__ import annotations

from math import isqrt

import numpy as np

from . import rng
from .bincode import BinaryCode, pack_sign_bits
from .errors import ConfigError
from .projection import CirculantProjector, Embedder, _as_batch, _as_vector

# one-byte kind tags used in projector files
KIND_LSH = 0
KIND_CBE = 1
KIND_BP = 2
KIND_PROPOSED = 3

METHODS = ("lsh", "cbe", "bp", "proposed")


def largest_divisor_at_most_sqrt(n: int) -> int:
    """Largest divisor of n that is <= sqrt(n); 1 in the worst (prime) case."""
    for d in range(isqrt(n), 0, -1):
        if n % d == 0:
            return d
    raise AssertionError("unreachable: 1 divides everything")


class LshProjector:
    """Dense i.i.d. standard normal projection: O(mn) time and storage."""

    def __init__(self, n: int, m: int, seed: int = 0):
        if n < 1 or m < 1:
            raise ConfigError(f"dimensions must be positive, got n={n}, m={m}")
        self.n, self.m = int(n), int(m)
        self.seed = rng.check_seed(seed)
        self.matrix = rng.child_rng(seed, rng.GAUSSIAN_MATRIX).standard_normal((m, n))
        self.matrix.flags.writeable = False

    def project(self, x) -> np.ndarray:
        return self.matrix @ _as_vector(x, self.n)

    def project_batch(self, x) -> np.ndarray:
        return _as_batch(x, self.n) @ self.matrix.T

    def embed(self, x) -> BinaryCode:
        return BinaryCode.from_values(self.project(x))

    def embed_batch_words(self, x) -> np.ndarray:
        return pack_sign_bits(self.project_batch(x))


class CbeProjector:
    """Circulant projection at the full input size, first m coordinates kept.

    Runs a length-n FFT regardless of m, so its cost is O(n log n) even for
    tiny codes.  A Rademacher sign-flip diagonal is applied before the
    circulant (flag defaults to on, matching the usual construction).
    """

    def __init__(self, n: int, m: int | None = None, seed: int = 0, *,
                 sign_flips: bool = True, seed_vector=None, flips=None):
        m = n if m is None else m
        if n < 1 or not 1 <= m <= n:
            raise ConfigError(f"need 1 <= m <= n, got n={n}, m={m}")
        self.n, self.m = int(n), int(m)
        self.seed = rng.check_seed(seed)
        self.uses_sign_flips = bool(sign_flips)
        if seed_vector is None:
            seed_vector = rng.child_rng(seed, rng.SEED_VECTOR).standard_normal(n)
        self.kernel = CirculantProjector(seed_vector, seed)
        if self.kernel.m != self.n:
            raise ConfigError("seed vector length must equal n")
        if flips is not None:
            f = np.array(flips, dtype=np.float64)
            if f.shape != (self.n,) or not np.all(np.abs(f) == 1.0):
                raise ConfigError("flips must be a length-n vector of +/-1")
        elif self.uses_sign_flips:
            bits = rng.child_rng(seed, rng.SIGNS).integers(0, 2, n)
            f = bits * 2.0 - 1.0
        else:
            f = np.ones(n)
        f.flags.writeable = False
        self.sign_flips = f

    @property
    def seed_vector(self) -> np.ndarray:
        return self.kernel.seed_vector

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        return self.kernel.apply_fft(self.sign_flips * x)[: self.m]

    def project_batch(self, x) -> np.ndarray:
        x = _as_batch(x, self.n)
        return self.kernel.apply_fft_batch(self.sign_flips * x)[:, : self.m]

    def embed(self, x) -> BinaryCode:
        return BinaryCode.from_values(self.project(x))

    def embed_batch_words(self, x) -> np.ndarray:
        return pack_sign_bits(self.project_batch(x))


class BpProjector:
    """Bilinear projection: reshape x to n1 x n2 (column-major) and project
    each side with a small Gaussian matrix.

    The map is X -> L X R^T with L (m1 x n1) and R (m2 x n2); flattening
    column-major, the equivalent single matrix is kron(R, L).  With factors
    near sqrt(n) the cost is O(n^1.5).
    """

    def __init__(self, n: int, m: int, seed: int = 0, *,
                 n1: int | None = None, m1: int | None = None):
        if n < 1 or m < 1:
            raise ConfigError(f"dimensions must be positive, got n={n}, m={m}")
        self.n, self.m = int(n), int(m)
        self.seed = rng.check_seed(seed)
        self.n1 = largest_divisor_at_most_sqrt(self.n) if n1 is None else int(n1)
        self.m1 = largest_divisor_at_most_sqrt(self.m) if m1 is None else int(m1)
        if self.n1 < 1 or self.n % self.n1 != 0:
            raise ConfigError(f"n1={self.n1} does not factor n={self.n}")
        if self.m1 < 1 or self.m % self.m1 != 0:
            raise ConfigError(f"m1={self.m1} does not factor m={self.m}")
        self.n2 = self.n // self.n1
        self.m2 = self.m // self.m1
        self.left = rng.child_rng(seed, rng.GAUSSIAN_MATRIX, 0).standard_normal((self.m1, self.n1))
        self.right = rng.child_rng(seed, rng.GAUSSIAN_MATRIX, 1).standard_normal((self.m2, self.n2))
        self.left.flags.writeable = False
        self.right.flags.writeable = False

    def project(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        y = self.left @ x.reshape(self.n1, self.n2, order="F") @ self.right.T
        return y.reshape(-1, order="F")

    def project_batch(self, x) -> np.ndarray:
        x = _as_batch(x, self.n)
        # column-major n1 x n2 per row == row-major n2 x n1 transposed
        cube = x.reshape(-1, self.n2, self.n1).transpose(0, 2, 1)
        y = np.einsum("ij,bjk,lk->bil", self.left, cube, self.right, optimize=True)
        return y.transpose(0, 2, 1).reshape(-1, self.m)

    def kron_matrix(self) -> np.ndarray:
        """Equivalent m x n projection matrix; oracle for small instances."""
        return np.kron(self.right, self.left)

    def embed(self, x) -> BinaryCode:
        return BinaryCode.from_values(self.project(x))

    def embed_batch_words(self, x) -> np.ndarray:
        return pack_sign_bits(self.project_batch(x))


def make_projector(method: str, n: int, m: int, seed: int = 0):
    """Uniform factory over the four embedding methods."""
    if method == "lsh":
        return LshProjector(n, m, seed)
    if method == "cbe":
        return CbeProjector(n, m, seed)
    if method == "bp":
        return BpProjector(n, m, seed)
    if method == "proposed":
        return Embedder(n, m, seed)
    raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")
