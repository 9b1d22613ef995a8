"""Combinatorial base types: hypergraphs, simple graphs, rooted trees.

Vertices are dense 0-based integers everywhere. All types are frozen after
construction; derived data (adjacency, depths, Euler intervals) is cached
lazily on first access.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from .errors import FormatError, ParameterError

SUPPORTED_MAJOR = "1"


def _check_major(obj, what):
    # untagged objects are accepted: they appear nested inside tagged artifacts
    if isinstance(obj, dict) and "version" in obj:
        if str(obj["version"]).split(".")[0] != SUPPORTED_MAJOR:
            raise FormatError(f"unsupported {what} version {obj['version']!r}")


__all__ = [
    "Hypergraph",
    "Graph",
    "RootedTree",
    "max_density",
    "densest_subset",
    "max_degree",
    "is_unicyclic_components",
    "square",
]


@dataclass(frozen=True)
class Hypergraph:
    """Hypergraph on ``range(n)`` whose edges have at most ``r`` vertices.

    Edges are stored as sorted tuples in input order. Duplicate edges are
    rejected rather than merged.
    """

    n: int
    r: int
    edges: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.n < 0 or self.r < 1:
            raise ParameterError(f"need n >= 0 and r >= 1, got n={self.n}, r={self.r}")
        normed = []
        seen = set()
        for idx, e in enumerate(self.edges):
            t = tuple(sorted(int(v) for v in e))
            if len(t) == 0:
                raise ParameterError(f"edge {idx} is empty")
            if len(set(t)) != len(t):
                raise ParameterError(f"edge {idx} repeats a vertex: {list(e)}")
            if len(t) > self.r:
                raise ParameterError(f"edge {idx} has {len(t)} > r={self.r} vertices")
            if t[0] < 0 or t[-1] >= self.n:
                raise ParameterError(f"edge {idx} has a vertex outside [0, {self.n})")
            if t in seen:
                raise ParameterError(f"duplicate edge {list(t)} at index {idx}")
            seen.add(t)
            normed.append(t)
        object.__setattr__(self, "edges", tuple(normed))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def is_uniform(self) -> bool:
        return all(len(e) == self.r for e in self.edges)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices incident to each vertex."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj) -> "Hypergraph":
        _check_major(obj, "hypergraph")
        try:
            n, r, edges = obj["n"], obj["r"], obj["edges"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"hypergraph JSON missing field: {exc}") from None
        if not isinstance(n, int) or not isinstance(r, int):
            raise FormatError("hypergraph fields 'n' and 'r' must be integers")
        if not isinstance(edges, list):
            raise FormatError("hypergraph field 'edges' must be a list")
        for i, e in enumerate(edges):
            if not isinstance(e, list) or not all(isinstance(v, int) for v in e):
                raise FormatError(f"edges[{i}] must be a list of integers")
        try:
            return cls(n, r, tuple(tuple(e) for e in edges))
        except ParameterError as exc:
            raise FormatError(f"invalid hypergraph: {exc}") from None


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``range(n)``; edges stored as ``(u, v)`` with u < v."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"need n >= 0, got {self.n}")
        normed = []
        seen = set()
        for idx, (u, v) in enumerate(self.edges):
            u, v = int(u), int(v)
            if u == v:
                raise ParameterError(f"loop at vertex {u} (edge {idx})")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ParameterError(f"edge {idx} has an endpoint outside [0, {self.n})")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ParameterError(f"duplicate edge {list(e)} at index {idx}")
            seen.add(e)
            normed.append(e)
        object.__setattr__(self, "edges", tuple(normed))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edge_set if u < v else (v, u) in self.edge_set

    @property
    def degrees(self) -> list[int]:
        return [len(a) for a in self.neighbors]

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def regular_degree(self) -> int | None:
        """Common degree if the graph is regular, else None."""
        degs = set(self.degrees)
        if len(degs) > 1:
            return None
        return degs.pop() if degs else 0

    def adjacency_array(self) -> np.ndarray:
        """Row ``v`` lists the neighbours of ``v`` in ascending order.

        Only defined for regular graphs; used by the walk kernels.
        """
        d = self.regular_degree()
        if d is None:
            raise ParameterError("adjacency array requires a regular graph")
        return np.array(self.neighbors, dtype=np.int64).reshape(self.n, d)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1.0
        return A

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], deque([s])
            while queue:
                v = queue.popleft()
                comp.append(v)
                for w in self.neighbors[v]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def bfs_distances(self, source: int) -> list[int]:
        """Hop distances from ``source``; -1 marks unreachable vertices."""
        dist = [-1] * self.n
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in self.neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def to_json(self) -> dict:
        return {"n": self.n, "r": 2, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj) -> "Graph":
        _check_major(obj, "graph")
        try:
            n, edges = obj["n"], obj["edges"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"graph JSON missing field: {exc}") from None
        if obj.get("r", 2) != 2:
            raise FormatError("graph JSON must have r = 2")
        if not isinstance(n, int) or not isinstance(edges, list):
            raise FormatError("graph JSON needs integer 'n' and list 'edges'")
        for i, e in enumerate(edges):
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e)):
                raise FormatError(f"edges[{i}] must be a pair of integers")
        try:
            return cls(n, tuple(tuple(e) for e in edges))
        except ParameterError as exc:
            raise FormatError(f"invalid graph: {exc}") from None


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree with ordered children and a vertex order used for tie-breaking.

    ``parent[root] == root``. ``child_order[v]`` lists the children of ``v``;
    the k-th child (1-based) is ``child_order[v][k-1]``. ``vertex_order`` is
    the permutation pi; smaller position wins ties.
    """

    n: int
    parent: tuple[int, ...]
    child_order: tuple[tuple[int, ...], ...] = None
    vertex_order: tuple[int, ...] = None
    root: int = field(init=False)

    def __post_init__(self):
        n = self.n
        parent = tuple(int(p) for p in self.parent)
        if n < 1 or len(parent) != n:
            raise ParameterError("parent array must have length n >= 1")
        roots = [v for v in range(n) if parent[v] == v]
        if len(roots) != 1:
            raise ParameterError(f"expected exactly one root, found {len(roots)}")
        if any(not 0 <= p < n for p in parent):
            raise ParameterError("parent entry outside [0, n)")
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if v != p:
                children[p].append(v)
        if self.child_order is None:
            order = tuple(tuple(c) for c in children)
        else:
            order = tuple(tuple(int(c) for c in cs) for cs in self.child_order)
            if len(order) != n or any(sorted(order[v]) != children[v] for v in range(n)):
                raise ParameterError("child_order must list each vertex's children exactly once")
        pi = tuple(range(n)) if self.vertex_order is None else tuple(int(v) for v in self.vertex_order)
        if sorted(pi) != list(range(n)):
            raise ParameterError("vertex_order must be a permutation of range(n)")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "child_order", order)
        object.__setattr__(self, "vertex_order", pi)
        object.__setattr__(self, "root", roots[0])
        # connectivity / acyclicity: every vertex must reach the root
        if len(self.bfs_order) != n:
            raise ParameterError("parent array contains a cycle")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], root: int = 0) -> "RootedTree":
        adj: list[list[int]] = [[] for _ in range(n)]
        count = 0
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
            count += 1
        if count != n - 1:
            raise ParameterError(f"a tree on {n} vertices needs {n - 1} edges, got {count}")
        parent = [-1] * n
        parent[root] = root
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in sorted(adj[v]):
                if parent[w] < 0:
                    parent[w] = v
                    queue.append(w)
        if min(parent) < 0:
            raise ParameterError("edge list is not connected")
        return cls(n, tuple(parent))

    @cached_property
    def bfs_order(self) -> tuple[int, ...]:
        order = [self.root]
        i = 0
        while i < len(order):
            order.extend(self.child_order[order[i]])
            i += 1
            if len(order) > self.n:
                break
        return tuple(order)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        depth = [0] * self.n
        for v in self.bfs_order[1:]:
            depth[v] = depth[self.parent[v]] + 1
        return tuple(depth)

    @cached_property
    def rank(self) -> tuple[int, ...]:
        """Position of each vertex in ``vertex_order``."""
        rank = [0] * self.n
        for pos, v in enumerate(self.vertex_order):
            rank[v] = pos
        return tuple(rank)

    @cached_property
    def _euler(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        tin, tout = [0] * self.n, [0] * self.n
        clock = 0
        stack = [(self.root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                tout[v] = clock
                continue
            tin[v] = clock
            clock += 1
            stack.append((v, True))
            for c in reversed(self.child_order[v]):
                stack.append((c, False))
        return tuple(tin), tuple(tout)

    def in_subtree(self, v: int, top: int) -> bool:
        """True iff ``v`` lies in the subtree rooted at ``top``."""
        tin, tout = self._euler
        return tin[top] <= tin[v] < tout[top]

    def subtree(self, top: int) -> list[int]:
        tin, tout = self._euler
        return [v for v in range(self.n) if tin[top] <= tin[v] < tout[top]]

    def ancestor(self, v: int, steps: int) -> int:
        for _ in range(steps):
            if v == self.root:
                raise ParameterError("walked above the root")
            v = self.parent[v]
        return v

    def lca(self, u: int, v: int) -> int:
        depth = self.depth
        while depth[u] > depth[v]:
            u = self.parent[u]
        while depth[v] > depth[u]:
            v = self.parent[v]
        while u != v:
            u, v = self.parent[u], self.parent[v]
        return u

    def dist(self, u: int, v: int) -> int:
        w = self.lca(u, v)
        return self.depth[u] + self.depth[v] - 2 * self.depth[w]

    def child_index(self, v: int) -> int:
        """1-based position of ``v`` among its parent's children."""
        return self.child_order[self.parent[v]].index(v) + 1

    def down_path(self, top: int, v: int) -> tuple[int, ...]:
        """Child indices leading from ``top`` down to its descendant ``v``."""
        moves = []
        while v != top:
            moves.append(self.child_index(v))
            v = self.parent[v]
        return tuple(reversed(moves))

    def follow(self, top: int, moves: Sequence[int]) -> int:
        v = top
        for c in moves:
            kids = self.child_order[v]
            if not 1 <= c <= len(kids):
                raise ParameterError(f"child index {c} invalid at vertex {v}")
            v = kids[c - 1]
        return v

    @property
    def max_degree(self) -> int:
        """Maximum degree of the underlying undirected tree."""
        return max(
            (len(self.child_order[v]) + (v != self.root) for v in range(self.n)),
            default=0,
        )

    def edges(self) -> list[tuple[int, int]]:
        return [(min(v, p), max(v, p)) for v, p in enumerate(self.parent) if v != p]

    def to_graph(self) -> Graph:
        return Graph(self.n, tuple(sorted(self.edges())))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "root": self.root,
            "parent": list(self.parent),
            "child_order": [list(c) for c in self.child_order],
        }

    @classmethod
    def from_json(cls, obj) -> "RootedTree":
        _check_major(obj, "tree")
        try:
            n, root, parent = obj["n"], obj["root"], obj["parent"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"tree JSON missing field: {exc}") from None
        child_order = obj.get("child_order")
        try:
            tree = cls(n, tuple(parent), None if child_order is None else tuple(map(tuple, child_order)))
        except (ParameterError, TypeError) as exc:
            raise FormatError(f"invalid tree: {exc}") from None
        if tree.root != root:
            raise FormatError(f"declared root {root} disagrees with parent array root {tree.root}")
        return tree


def max_degree(H: Hypergraph) -> int:
    return max((len(inc) for inc in H.incidence), default=0)


def _max_excess(H: Hypergraph, g: Fraction) -> frozenset[int]:
    """Source side (vertices) of a min cut for the density test at ``g``.

    Network: source -> edge node (cap q), edge node -> its vertices (cap inf),
    vertex -> sink (cap p), with g = p/q. The min cut equals
    q*e(H) - max_S (q*e(S) - p*|S|), and the reachable vertices realize the max.
    """
    p, q = g.numerator, g.denominator
    e, n = H.num_edges, H.n
    src, snk = 0, 1
    big = q * e + 1
    rows, cols, caps = [], [], []
    for i, edge in enumerate(H.edges):
        rows.append(src)
        cols.append(2 + i)
        caps.append(q)
        for v in edge:
            rows.append(2 + i)
            cols.append(2 + e + v)
            caps.append(big)
    for v in range(n):
        if p > 0:
            rows.append(2 + e + v)
            cols.append(snk)
            caps.append(p)
    size = 2 + e + n
    if big >= 2**31:
        raise ParameterError("instance too large for int32 flow capacities")
    cap = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(size, size))
    flow = maximum_flow(cap, src, snk).flow
    residual = (cap - flow).tocsr()
    residual.data[residual.data < 0] = 0
    residual.eliminate_zeros()
    reach = breadth_first_order(residual, src, directed=True, return_predecessors=False)
    return frozenset(int(x) - 2 - e for x in reach if x >= 2 + e)


def densest_subset(H: Hypergraph) -> tuple[Fraction, frozenset[int]]:
    """Exact maximum density together with a vertex set attaining it.

    Parametric min-cut search: starting from g = 0, each cut returns the set
    maximizing e(S) - g|S|; if that excess is positive, g moves up to e(S)/|S|.
    Every step strictly increases g among finitely many values, so the loop
    ends at the exact optimum.
    """
    if H.num_edges == 0:
        return Fraction(0), frozenset()
    g = Fraction(0)
    best: frozenset[int] = frozenset()
    while True:
        S = _max_excess(H, g)
        if not S:
            return g, best
        eS = sum(1 for edge in H.edges if all(v in S for v in edge))
        cand = Fraction(eS, len(S))
        if cand <= g:
            return g, best
        g, best = cand, S


def max_density(H: Hypergraph) -> Fraction:
    """m(H) = max over sub-hypergraphs of e/v, as an exact fraction (0 if edgeless)."""
    return densest_subset(H)[0]


def is_unicyclic_components(G: Graph) -> bool:
    """True iff every connected component has at most as many edges as vertices."""
    root = list(range(G.n))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for u, v in G.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            root[ru] = rv
    verts: dict[int, int] = {}
    edges: dict[int, int] = {}
    for v in range(G.n):
        r = find(v)
        verts[r] = verts.get(r, 0) + 1
    for u, _ in G.edges:
        r = find(u)
        edges[r] = edges.get(r, 0) + 1
    return all(edges.get(r, 0) <= cnt for r, cnt in verts.items())


def square(G: Graph) -> Graph:
    """Join every two distinct vertices at distance at most 2."""
    out = set(G.edges)
    for v in range(G.n):
        nb = G.neighbors[v]
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                out.add((a, b) if a < b else (b, a))
    return Graph(G.n, tuple(sorted(out)))
