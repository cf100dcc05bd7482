"""Deterministic RNG derivation.

Every stochastic routine takes a 64-bit master seed and derives one
generator per logical stream from it, so that concurrent chains never share
state and reduction identities (e.g. a walk with jump weight zero equals a
plain walk) hold exactly.
"""

from __future__ import annotations

import random

import numpy as np

# Stream offsets for coupled walks.
STREAM_TARGET = 0
STREAM_MH = 1
STREAM_AUX = 2


def spawn_seed(master: int, *key: int) -> int:
    """128-bit child seed, a pure function of (master, key)."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(key))
    hi, lo = ss.generate_state(2, np.uint64)
    return (int(hi) << 64) | int(lo)


def spawn_rng(master: int, *key: int) -> random.Random:
    return random.Random(spawn_seed(master, *key))


def replication_seeds(master: int, runs: int) -> list[int]:
    """Pairwise-distinct per-replication seeds derived from the master seed."""
    seeds = [spawn_seed(master, 97, r) for r in range(runs)]
    if len(set(seeds)) != len(seeds):  # pragma: no cover - 128-bit collision
        raise RuntimeError("replication seed collision; change master seed")
    return seeds
