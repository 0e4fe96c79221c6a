"""Deterministic seed derivation.

All randomness in the package flows through numpy's PCG64 generator keyed
by a ``SeedSequence`` whose ``spawn_key`` encodes where the stream is used
(domain constant) plus any per-item index.  Giving trial ``t`` the derived
key ``(TRIAL, t)`` makes every experiment's output independent of execution
order and worker count.
"""

from __future__ import annotations

import numpy as np

# spawn-key domains; fixed forever, they are part of the on-disk formats
PERMUTATION = 0
SIGNS = 1
SEED_VECTOR = 2
GAUSSIAN_MATRIX = 3
TRIAL = 4
PAIR = 5
REPLICATE = 6
CORPUS = 7
QUERY = 8
PROJECTOR = 9
VECTORS = 10

_U64 = 1 << 64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def child_seq(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))


def child_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(child_seq(seed, *key))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse a derived stream to a fresh 64-bit seed (for sub-components)."""
    return int(child_seq(seed, *key).generate_state(1, np.uint64)[0])
