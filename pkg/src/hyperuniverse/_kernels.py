"""Hot loops of the branching-walk Monte Carlo.

Each kernel has a numba version and a pure-numpy version with identical
outputs. The numba path is used when numba imports and the environment
variable ``HYPERUNIVERSE_DISABLE_NUMBA`` is unset (or "0"). Randomness is drawn
outside the kernels, so both paths consume the same choice arrays and the
results agree bit for bit.

Array conventions: a tree with N vertices is laid out in BFS order; column j
of ``choices`` drives position j. ``choices[:, 0]`` is the root image in
``[0, n)``; ``choices[:, j]`` for j >= 1 picks a neighbour slot in ``[0, d)``
of the parent's image. ``parent_pos[j]`` is the BFS position of the parent
of position j (``parent_pos[0]`` is ignored). ``adj`` is the ``(n, d)``
neighbour table of a d-regular host.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and os.environ.get("HYPERUNIVERSE_DISABLE_NUMBA", "0").lower() in (
    "",
    "0",
    "false",
    "no",
)


def walk_images_np(choices, parent_pos, adj):
    trials, N = choices.shape
    phi = np.empty((trials, N), dtype=np.int64)
    if N == 0:
        return phi
    phi[:, 0] = choices[:, 0]
    for j in range(1, N):
        phi[:, j] = adj[phi[:, parent_pos[j]], choices[:, j]]
    return phi


def hit_counts_np(choices, parent_pos, adj, u_mask, x):
    phi = walk_images_np(choices, parent_pos, adj)
    return (phi[:, u_mask] == x).sum(axis=1).astype(np.int64)


def hit_histogram_np(choices, parent_pos, adj, u_mask, x):
    counts = hit_counts_np(choices, parent_pos, adj, u_mask, x)
    return np.bincount(counts, minlength=int(u_mask.sum()) + 1).astype(np.int64)


if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def walk_images_nb(choices, parent_pos, adj):
        trials, N = choices.shape
        phi = np.empty((trials, N), dtype=np.int64)
        for t in range(trials):
            if N == 0:
                break
            phi[t, 0] = choices[t, 0]
            for j in range(1, N):
                phi[t, j] = adj[phi[t, parent_pos[j]], choices[t, j]]
        return phi

    @numba.njit(cache=True)
    def hit_counts_nb(choices, parent_pos, adj, u_mask, x):
        trials, N = choices.shape
        out = np.zeros(trials, dtype=np.int64)
        buf = np.empty(max(N, 1), dtype=np.int64)
        for t in range(trials):
            if N == 0:
                break
            buf[0] = choices[t, 0]
            c = 1 if (u_mask[0] and buf[0] == x) else 0
            for j in range(1, N):
                v = adj[buf[parent_pos[j]], choices[t, j]]
                buf[j] = v
                if u_mask[j] and v == x:
                    c += 1
            out[t] = c
        return out

    @numba.njit(cache=True)
    def hit_histogram_nb(choices, parent_pos, adj, u_mask, x):
        size = 1
        for j in range(u_mask.shape[0]):
            if u_mask[j]:
                size += 1
        hist = np.zeros(size, dtype=np.int64)
        counts = hit_counts_nb(choices, parent_pos, adj, u_mask, x)
        for t in range(counts.shape[0]):
            hist[counts[t]] += 1
        return hist

else:  # pragma: no cover
    walk_images_nb = walk_images_np
    hit_counts_nb = hit_counts_np
    hit_histogram_nb = hit_histogram_np


if NUMBA_ENABLED:
    walk_images = walk_images_nb
    hit_counts = hit_counts_nb
    hit_histogram = hit_histogram_nb
else:
    walk_images = walk_images_np
    hit_counts = hit_counts_np
    hit_histogram = hit_histogram_np


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
