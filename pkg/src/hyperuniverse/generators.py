"""Seeded instance generators and small exhaustive families."""

from __future__ import annotations

import itertools

import numpy as np

from . import rng as rngmod
from .core import Hypergraph, RootedTree


def random_hypergraph(n: int, r: int, D: int, seed: int, num_edges: int | None = None, tries: int = 50) -> Hypergraph:
    """Random r-graph on n vertices with maximum degree at most D.

    Edges are drawn among vertices of remaining capacity until ``num_edges``
    are placed (default: as many as fit, about D*n/r) or draws keep failing.
    """
    gen = rngmod.stream(seed, rngmod.INSTANCE, n, r, D)
    target = (D * n) // r if num_edges is None else num_edges
    cap = np.full(n, D)
    edges: set[tuple[int, ...]] = set()
    misses = 0
    while len(edges) < target and misses < tries:
        free = np.flatnonzero(cap > 0)
        if free.size < r:
            break
        e = tuple(sorted(int(v) for v in gen.choice(free, size=r, replace=False)))
        if e in edges:
            misses += 1
            continue
        edges.add(e)
        cap[list(e)] -= 1
        misses = 0
    return Hypergraph(n, r, tuple(sorted(edges)))


def random_tree(n: int, seed: int, max_children: int | None = None) -> RootedTree:
    """Random recursive tree: vertex v attaches to a uniform earlier vertex with room."""
    gen = rngmod.stream(seed, rngmod.INSTANCE, n, 7)
    parent = [0]
    kids = [0] * n
    for v in range(1, n):
        options = [u for u in range(v) if max_children is None or kids[u] < max_children]
        p = int(options[gen.integers(len(options))])
        parent.append(p)
        kids[p] += 1
    return RootedTree(n, tuple(parent))


def recursive_trees(n: int):
    """Every parent array with parent[v] < v for v >= 1 (root 0).

    Covers each rooted tree shape on n vertices under many labelings, hence
    many choices of the tie-breaking orders; (n-1)! trees in total.
    """
    for tail in itertools.product(*[range(v) for v in range(1, n)]):
        yield RootedTree(n, (0, *tail))


def path_tree(n: int) -> RootedTree:
    return RootedTree(n, (0, *range(n - 1)))


def star_tree(leaves: int) -> RootedTree:
    return RootedTree(leaves + 1, (0,) + (0,) * leaves)
