"""Core embedding pipeline: h = sign(D Phi R x).

``R`` scrambles the input (global permutation composed with per-coordinate
sign flips), ``Phi`` folds the scrambled vector by summing congruence
classes mod ``m`` (additions only), and ``D`` is an ``m x m`` circulant
projection applied through the FFT.  Total work is O(n + m log m) and the
stored state is O(n) bits.

Conventions pinned here because codes are compared bitwise:

* sign(0) = +1.
* The circulant row convention is row ``i`` = seed row cyclically shifted
  right ``i`` places, i.e. ``D[i, j] = d[(j - i) mod m]``, so ``D @ v`` is
  the circular cross-correlation of the seed with ``v`` and the frequency
  form uses the conjugated seed spectrum.  The naive O(m^2) multiply is the
  authoritative oracle for this choice.
* Inputs whose length is not a multiple of ``m`` are zero-padded at the
  embedder boundary; everything below requires exact divisibility.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .bincode import BinaryCode, pack_sign_bits
from .errors import ConfigError, ShapeError, SizeError

MATERIALIZE_CAP = 1 << 22  # max m*n entries for an explicit projection matrix


def _as_vector(x, n: int, what: str = "input") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != n:
        raise ShapeError(f"{what} must be a length-{n} vector, got shape {x.shape}")
    return x


def _as_batch(x, n: int, what: str = "input") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != n:
        raise ShapeError(f"{what} must be a (batch, {n}) array, got shape {x.shape}")
    return x


class Randomizer:
    """Global permutation + per-coordinate sign flips, regenerable from a seed.

    ``apply`` maps x to y with ``y[perm[i]] = signs[i] * x[i]``; it only
    reorders and negates, so the multiset of absolute values (and hence the
    l2 norm) is preserved exactly.

    Explicit ``permutation``/``signs`` arrays may be injected; this is how
    deserialization honors file contents and how tests pin tiny instances.
    """

    def __init__(self, n: int, seed: int = 0, *, permutation=None, signs=None):
        if n < 1:
            raise ConfigError(f"dimension must be positive, got {n}")
        self.n = int(n)
        self.seed = rng.check_seed(seed)
        self._permutation = None if permutation is None else self._check_perm(permutation)
        self._signs = None if signs is None else self._check_signs(signs)

    def _check_perm(self, permutation) -> np.ndarray:
        p = np.array(permutation, dtype=np.int64)
        if p.shape != (self.n,) or not np.array_equal(np.sort(p), np.arange(self.n)):
            raise ConfigError("permutation must be a bijection on 0..n-1")
        p.flags.writeable = False
        return p

    def _check_signs(self, signs) -> np.ndarray:
        s = np.array(signs, dtype=np.float64)
        if s.shape != (self.n,) or not np.all(np.abs(s) == 1.0):
            raise ConfigError("signs must be a length-n vector of +/-1")
        s.flags.writeable = False
        return s

    @property
    def permutation(self) -> np.ndarray:
        if self._permutation is None:
            p = rng.child_rng(self.seed, rng.PERMUTATION).permutation(self.n)
            self._permutation = self._check_perm(p)
        return self._permutation

    @property
    def signs(self) -> np.ndarray:
        if self._signs is None:
            bits = rng.child_rng(self.seed, rng.SIGNS).integers(0, 2, self.n)
            self._signs = self._check_signs(bits * 2.0 - 1.0)
        return self._signs

    def apply(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        out = np.empty_like(x)
        out[self.permutation] = self.signs * x
        return out

    def apply_batch(self, x) -> np.ndarray:
        x = _as_batch(x, self.n)
        out = np.empty_like(x)
        out[:, self.permutation] = self.signs * x
        return out


class Downsampler:
    """Fold a length-n vector to length m by summing residue classes mod m."""

    def __init__(self, n: int, m: int):
        if m < 1 or n < m:
            raise ConfigError(f"need 1 <= m <= n, got n={n}, m={m}")
        if n % m != 0:
            raise ConfigError(f"m must divide n (callers pad first): n={n}, m={m}")
        self.n = int(n)
        self.m = int(m)

    def apply(self, y) -> np.ndarray:
        y = _as_vector(y, self.n)
        return y.reshape(self.n // self.m, self.m).sum(axis=0)

    def apply_batch(self, y) -> np.ndarray:
        y = _as_batch(y, self.n)
        return y.reshape(-1, self.n // self.m, self.m).sum(axis=1)


class CirculantProjector:
    """Square circulant matrix generated by a seed row, with an FFT fast path.

    The seed spectrum (full forward DFT of the seed row) is cached at
    construction; applying the projector costs two real FFTs of length m.
    """

    def __init__(self, seed_vector, seed: int = 0):
        vec = np.array(seed_vector, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] < 1:
            raise ConfigError("seed vector must be a non-empty 1-D real vector")
        vec.flags.writeable = False
        self.seed_vector = vec
        self.m = vec.shape[0]
        self.seed = rng.check_seed(seed)
        self.seed_spectrum = np.fft.fft(vec)
        self.seed_spectrum.flags.writeable = False
        # rfft(seed) equals the first half of the full spectrum for real seeds
        self._half_conj = np.conj(self.seed_spectrum[: self.m // 2 + 1])

    @classmethod
    def from_seed(cls, m: int, seed: int) -> "CirculantProjector":
        if m < 1:
            raise ConfigError(f"dimension must be positive, got {m}")
        vec = rng.child_rng(seed, rng.SEED_VECTOR).standard_normal(m)
        return cls(vec, seed)

    def matrix(self) -> np.ndarray:
        """Materialize the full circulant: row i is the seed shifted right i."""
        idx = (np.arange(self.m)[None, :] - np.arange(self.m)[:, None]) % self.m
        return self.seed_vector[idx]

    def apply_fft(self, v) -> np.ndarray:
        return self.apply_fft_unchecked(_as_vector(v, self.m))

    def apply_fft_unchecked(self, v: np.ndarray) -> np.ndarray:
        return np.fft.irfft(self._half_conj * np.fft.rfft(v), n=self.m)

    def apply_fft_batch(self, v) -> np.ndarray:
        v = _as_batch(v, self.m)
        return np.fft.irfft(self._half_conj * np.fft.rfft(v, axis=-1), n=self.m, axis=-1)

    def apply_naive(self, v) -> np.ndarray:
        """Explicit O(m^2) multiply; the reference oracle for apply_fft."""
        v = _as_vector(v, self.m)
        return self.matrix() @ v


class Embedder:
    """End-to-end pipeline mapping length-n reals to m-bit codes.

    Immutable after construction and safe for concurrent use; per-call
    scratch only.  A single 64-bit seed determines the permutation, the
    sign flips, and the circulant seed row, so equal seeds give bit
    identical codes.
    """

    def __init__(self, n: int, m: int, seed: int = 0, *, randomizer=None, circulant=None):
        if n < 1 or m < 1:
            raise ConfigError(f"dimensions must be positive, got n={n}, m={m}")
        self.n = int(n)
        self.m = int(m)
        self.seed = rng.check_seed(seed)
        self.n_padded = m * -(-n // m)
        self.randomizer = randomizer if randomizer is not None else Randomizer(self.n_padded, seed)
        self.circulant = circulant if circulant is not None else CirculantProjector.from_seed(m, seed)
        self.downsampler = Downsampler(self.n_padded, self.m)
        if self.randomizer.n != self.n_padded:
            raise ConfigError("randomizer dimension must equal the padded input dimension")
        if self.circulant.m != self.m:
            raise ConfigError("circulant dimension must equal the output dimension")
        # Fused scramble+fold: coordinate i contributes signs[i]*x[i] to
        # residue class permutation[i] mod m.  The permutation is a
        # bijection, so grouping source indices by destination residue
        # gives exactly n/m per class and the fold becomes one gather plus
        # a contiguous row sum (no scatter).  Equals the composed
        # Randomizer/Downsampler path up to summation order.
        order = np.argsort(self.randomizer.permutation % self.m, kind="stable")
        self._fold_order = order.astype(np.int32) if self.n_padded < 2**31 else order
        self._fold_signs = np.ascontiguousarray(
            self.randomizer.signs.take(order).reshape(self.m, -1)
        )

    def _pad(self, x: np.ndarray) -> np.ndarray:
        if self.n_padded == self.n:
            return x
        pad = [(0, self.n_padded - self.n)] if x.ndim == 1 else [(0, 0), (0, self.n_padded - self.n)]
        return np.pad(x, pad)

    def project(self, x) -> np.ndarray:
        """The linear part D Phi R x, before sign quantization."""
        x = self._pad(_as_vector(x, self.n))
        gathered = x.take(self._fold_order).reshape(self.m, -1)
        folded = np.einsum("ij,ij->i", gathered, self._fold_signs)
        return self.circulant.apply_fft_unchecked(folded)

    def project_composed(self, x) -> np.ndarray:
        """Same map through the separate stage objects; oracle for project."""
        x = self._pad(_as_vector(x, self.n))
        return self.circulant.apply_fft(self.downsampler.apply(self.randomizer.apply(x)))

    def project_batch(self, x) -> np.ndarray:
        x = self._pad(_as_batch(x, self.n))
        gathered = np.take(x, self._fold_order, axis=1).reshape(-1, self.m, self.n_padded // self.m)
        folded = np.einsum("bij,ij->bi", gathered, self._fold_signs)
        return self.circulant.apply_fft_batch(folded)

    def embed(self, x) -> BinaryCode:
        return BinaryCode.from_values(self.project(x))

    def embed_batch_words(self, x) -> np.ndarray:
        """Embed a batch; returns packed uint64 words, one row per input."""
        return pack_sign_bits(self.project_batch(x))

    def materialize(self) -> np.ndarray:
        """Explicit m x n matrix A with embed(x) == sign(A @ x); test oracle.

        Capped because the whole point of the pipeline is never forming A.
        """
        if self.m * self.n > MATERIALIZE_CAP:
            raise SizeError(
                f"refusing to materialize {self.m}x{self.n} projection "
                f"(cap {MATERIALIZE_CAP} entries)"
            )
        return self.project_batch(np.eye(self.n)).T


def materialize_projection(embedder: Embedder) -> np.ndarray:
    return embedder.materialize()
