"""Deterministic seed derivation.

All randomness in the library flows through integer seeds derived from a
root seed plus integer context keys (degree, candidate K, fold, tree index,
...), so results never depend on execution order or worker count.
"""

import zlib

import numpy as np


def derive_seed(*keys: int) -> int:
    """Collapse a tuple of integer keys into one 32-bit seed."""
    ss = np.random.SeedSequence([int(k) & 0xFFFFFFFF for k in keys])
    return int(ss.generate_state(1)[0])


def name_key(name: str) -> int:
    """Stable integer key for a string (dataset names in bench seeds)."""
    return zlib.crc32(name.encode("utf-8"))
