"""Counter-based seed derivation so parallel work stays reproducible."""

import numpy as np


def derive_seed(base: int, *keys: int) -> int:
    """Independent 63-bit seed for the stream identified by ``(base, *keys)``."""
    state = np.random.SeedSequence(base, spawn_key=tuple(int(k) for k in keys))
    return int(state.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_rng(base: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(base, *keys))
