#!/usr/bin/env python3
"""
cimbench - Seed derivation

Child streams are addressed by a key path below a master seed, so a stream
depends only on (master, key...) and never on how many siblings were drawn.
"""

import hashlib
from typing import Union

import numpy as np

SeedLike = Union[None, int, np.random.SeedSequence]


def stable_key(name: str) -> int:
    """32-bit key of a string that is stable across processes"""
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:4], "little")


def derive_seed(seed: SeedLike, *keys: Union[int, str]) -> np.random.SeedSequence:
    """SeedSequence for the child at path `keys` below `seed`"""
    if isinstance(seed, np.random.SeedSequence):
        entropy, prefix = seed.entropy, tuple(seed.spawn_key)
    else:
        entropy, prefix = (0 if seed is None else int(seed)), ()
    path = tuple(stable_key(k) if isinstance(k, str) else int(k) for k in keys)
    return np.random.SeedSequence(entropy=entropy, spawn_key=prefix + path)


def seed_label(seed: SeedLike) -> int:
    """Integer recorded in traces to identify a trial's stream"""
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(1)[0])
    return -1 if seed is None else int(seed)
