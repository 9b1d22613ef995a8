"""Slow, independent reference implementations used only by the tests.

None of these share code paths with the package beyond the basic data types.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow, shortest_path

from hyperuniverse.core import Graph, Hypergraph, RootedTree


def brute_density(H: Hypergraph) -> Fraction:
    best = Fraction(0)
    for k in range(1, H.n + 1):
        for S in itertools.combinations(range(H.n), k):
            s = set(S)
            e = sum(1 for edge in H.edges if s.issuperset(edge))
            best = max(best, Fraction(e, k))
    return best


def hall_independent(H: Hypergraph, b: int, X) -> bool:
    """Cap check plus Hall's condition over every subset of X."""
    X = sorted(set(X))
    counts = {}
    for u in X:
        counts[u // b] = counts.get(u // b, 0) + 1
    if any(c > H.r - 1 for c in counts.values()):
        return False
    for k in range(1, len(X) + 1):
        for Y in itertools.combinations(X, k):
            nbhd = set().union(*(H.edges[u // b] for u in Y))
            if len(nbhd) < k:
                return False
    return True


def distances(G: Graph) -> np.ndarray:
    if not G.edges:
        D = np.full((G.n, G.n), np.inf)
        np.fill_diagonal(D, 0)
        return D
    rows = [u for u, v in G.edges]
    cols = [v for u, v in G.edges]
    A = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(G.n, G.n))
    return shortest_path(A, directed=False, unweighted=True)


def square_edges(G: Graph) -> set[tuple[int, int]]:
    D = distances(G)
    return {(u, v) for u in range(G.n) for v in range(u + 1, G.n) if D[u, v] <= 2}


def hit_distribution_dp(T: RootedTree, G: Graph, U, x: int) -> list[int]:
    """Integer counts of walks by number of U-vertices on x, by a subtree DP.

    poly[t][y] is the count polynomial (list indexed by hits) over all walks of
    the subtree of t with t mapped to y.
    """
    U = set(U)
    nb = G.neighbors
    children = [[] for _ in range(T.n)]
    for v, p in enumerate(T.parent):
        if v != p:
            children[p].append(v)

    def mul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return out

    def add(a, b):
        out = [0] * max(len(a), len(b))
        for i, c in enumerate(a):
            out[i] += c
        for i, c in enumerate(b):
            out[i] += c
        return out

    order = list(T.bfs_order)
    poly = [None] * T.n
    for t in reversed(order):
        row = []
        for y in range(G.n):
            p = [0, 1] if (t in U and y == x) else [1]
            for c in children[t]:
                s = [0]
                for z in nb[y]:
                    s = add(s, poly[c][z])
                p = mul(p, s)
            row.append(p)
        poly[t] = row
    total = [0]
    for y in range(G.n):
        total = add(total, poly[T.root][y])
    return total


def partition_feasible_by_flow(H: Hypergraph, a: int, b: int) -> bool:
    """Can the b copies of every hyperedge be split into a capped, matchable parts?

    Network: source -> h (cap b) -> (h, i) (cap r-1) -> (v, i) for v in h (cap 1)
    -> sink (cap 1). An integral flow of value b e(H) is exactly such a split.
    """
    e = H.num_edges
    if e == 0:
        return True
    n, r = H.n, H.r
    src, h0 = 0, 1
    hi0 = h0 + e
    vi0 = hi0 + e * a
    sink = vi0 + n * a
    rows, cols, caps = [], [], []

    def arc(u, v, c):
        rows.append(u)
        cols.append(v)
        caps.append(c)

    for h, edge in enumerate(H.edges):
        arc(src, h0 + h, b)
        for i in range(a):
            arc(h0 + h, hi0 + h * a + i, r - 1)
            for v in edge:
                arc(hi0 + h * a + i, vi0 + v * a + i, 1)
    for v in range(n):
        for i in range(a):
            arc(vi0 + v * a + i, sink, 1)
    M = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(sink + 1, sink + 1))
    return maximum_flow(M, src, sink).flow_value == b * e


def gamma_edge_brute(gp, points) -> bool:
    """Direct reading of the base edge rule: some indexed forest tuple and surjection."""
    pts = sorted(set(tuple(p) for p in points))
    k = len(pts)
    for g in itertools.product(range(k), repeat=gp.r):
        if len(set(g)) != k:
            continue
        for t in gp.forest_index:
            if all(gp.adjacent(pts[g[u]][i], pts[g[v]][i]) for i, F in enumerate(t) for u, v in F):
                return True
    return False


def regular_graphs_up_to_6() -> dict[str, Graph]:
    """All connected regular graphs (d >= 1) on at most 6 vertices, up to isomorphism."""

    def cyc(n):
        return Graph(n, tuple(sorted((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n))))

    def complete(n):
        return Graph(n, tuple(itertools.combinations(range(n), 2)))

    k33 = Graph(6, tuple((u, v) for u in range(3) for v in range(3, 6)))
    prism = Graph(6, ((0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 3), (1, 4), (2, 5)))
    octa = Graph(6, tuple(e for e in itertools.combinations(range(6), 2) if e not in {(0, 1), (2, 3), (4, 5)}))
    return {
        "K2": complete(2),
        "K3": complete(3),
        "C4": cyc(4),
        "K4": complete(4),
        "C5": cyc(5),
        "K5": complete(5),
        "C6": cyc(6),
        "K33": k33,
        "prism": prism,
        "octahedron": octa,
        "K6": complete(6),
    }
