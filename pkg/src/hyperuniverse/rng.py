"""Named, splittable random streams.

Every random draw in the package goes through :func:`stream`, keyed by a
master seed plus a tuple of integers (stage, level, attempt, chunk...). The
same key always yields the same stream, independent of the order in which
streams are requested, so work can be split across workers freely.
"""

from __future__ import annotations

import numpy as np

# stream namespaces; keep values stable, artifacts depend on them
GRAPH = 1
CERTIFY = 2
WALK = 3
TAIL = 4
EMBED = 5
INSTANCE = 6


def stream(seed: int, *keys: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seeds and stream keys must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, keys)])))


def derive_seed(seed: int, *keys: int) -> int:
    """A 32-bit child seed, for places that store a plain integer seed."""
    ss = np.random.SeedSequence([int(seed), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])
