"""Matroids given by independence oracles, and Edmonds' matroid partitioning.

Ground sets are ``range(ground_size)``. Besides ``is_independent`` an oracle
may override ``can_add`` and ``swappable`` with faster structure-aware
versions; the partition algorithm only uses those two queries.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .core import Graph, Hypergraph
from .errors import InternalConsistencyError, ParameterError

__all__ = [
    "IndependenceOracle",
    "FunctionOracle",
    "GraphicMatroid",
    "CapTransversalMatroid",
    "PartitionResult",
    "max_bipartite_matching",
    "is_independent_cap",
    "rank",
    "edmonds_partition",
    "k_index",
    "axiom_check",
]


def max_bipartite_matching(adj: Mapping[Hashable, Sequence[Hashable]]) -> dict:
    """Hopcroft-Karp. ``adj`` maps left vertices to their right neighbours.

    Returns a maximum matching as a dict left -> right. Left vertices are
    processed in the mapping's iteration order, so results are deterministic.
    """
    left = list(adj)
    match_l: dict = {}
    match_r: dict = {}
    INF = math.inf
    while True:
        # layered BFS from free left vertices
        dist = {}
        queue = deque()
        for u in left:
            if u not in match_l:
                dist[u] = 0
                queue.append(u)
        limit = INF
        while queue:
            u = queue.popleft()
            if dist[u] >= limit:
                continue
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    if limit == INF:
                        limit = dist[u] + 1
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if limit == INF:
            return match_l

        def dfs(u):
            # iterative would be nicer, but paths are short (<= |left|)
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    if dist[u] + 1 == limit:
                        match_l[u], match_r[v] = v, u
                        return True
                elif dist.get(w) == dist[u] + 1 and dfs(w):
                    match_l[u], match_r[v] = v, u
                    return True
            dist[u] = INF
            return False

        for u in left:
            if u not in match_l and dist.get(u) == 0:
                dfs(u)


class IndependenceOracle:
    ground_size: int = 0

    def is_independent(self, X: Iterable[int]) -> bool:
        raise NotImplementedError

    def can_add(self, I: frozenset[int], y: int) -> bool:
        return self.is_independent(I | {y})

    def swappable(self, I: frozenset[int], y: int) -> list[int]:
        """Elements z of I such that I - z + y is independent, ascending."""
        return [z for z in sorted(I) if self.is_independent((I - {z}) | {y})]


class FunctionOracle(IndependenceOracle):
    """Oracle backed by an arbitrary predicate on frozensets."""

    def __init__(self, ground_size: int, predicate: Callable[[frozenset[int]], bool]):
        self.ground_size = ground_size
        self._predicate = predicate

    def is_independent(self, X):
        return bool(self._predicate(frozenset(X)))


class GraphicMatroid(IndependenceOracle):
    """Edges of a graph; independent sets are forests."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.ground_size = len(graph.edges)

    def is_independent(self, X):
        root = list(range(self.graph.n))

        def find(a):
            while root[a] != a:
                root[a] = root[root[a]]
                a = root[a]
            return a

        for idx in X:
            u, v = self.graph.edges[idx]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            root[ru] = rv
        return True

    def _forest_path(self, I, y):
        # edge indices on the I-path joining the endpoints of edge y, or None
        adj: dict[int, list[tuple[int, int]]] = {}
        for idx in I:
            a, b = self.graph.edges[idx]
            adj.setdefault(a, []).append((b, idx))
            adj.setdefault(b, []).append((a, idx))
        s, t = self.graph.edges[y]
        prev = {s: None}
        queue = deque([s])
        while queue:
            a = queue.popleft()
            if a == t:
                break
            for b, idx in adj.get(a, ()):
                if b not in prev:
                    prev[b] = (a, idx)
                    queue.append(b)
        if t not in prev:
            return None
        path = []
        while prev[t] is not None:
            t, idx = prev[t]
            path.append(idx)
        return path

    def can_add(self, I, y):
        return self._forest_path(I, y) is None

    def swappable(self, I, y):
        path = self._forest_path(I, y)
        return [] if path is None else sorted(path)


class CapTransversalMatroid(IndependenceOracle):
    """Copies of hyperedges, matchable into vertices, at most r-1 copies per hyperedge.

    Element ``u`` is copy ``u % b`` of hyperedge ``u // b``; it is adjacent to
    the vertices of that hyperedge in the bipartite lift.
    """

    def __init__(self, hypergraph: Hypergraph, b: int):
        if b < 1:
            raise ParameterError("need b >= 1 copies per hyperedge")
        self.hypergraph = hypergraph
        self.b = b
        self.r_cap = hypergraph.r - 1
        self.ground_size = b * hypergraph.num_edges
        self._cache: dict[frozenset[int], dict[int, int]] = {}

    def edge_of(self, u: int) -> int:
        return u // self.b

    def element(self, edge_index: int, copy: int) -> int:
        return edge_index * self.b + copy

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.hypergraph.edges[u // self.b]

    def _cap_ok(self, X) -> bool:
        counts: dict[int, int] = {}
        for u in X:
            h = u // self.b
            counts[h] = counts.get(h, 0) + 1
            if counts[h] > self.r_cap:
                return False
        return True

    def matching(self, X: Iterable[int]) -> dict[int, int]:
        """A maximum matching of X into V(H), as element -> vertex."""
        X = frozenset(X)
        m = self._cache.get(X)
        if m is None:
            m = max_bipartite_matching({u: self.neighbors(u) for u in sorted(X)})
            if len(self._cache) > 256:
                self._cache.clear()
            self._cache[X] = m
        return m

    def is_independent(self, X):
        X = frozenset(X)
        return self._cap_ok(X) and len(self.matching(X)) == len(X)

    def _alternating(self, I, y):
        # BFS over alternating paths from y; returns (augmentable, reachable elements)
        m = self.matching(I)
        owner = {v: u for u, v in m.items()}
        seen_v, reached = set(), []
        queue = deque([y])
        while queue:
            u = queue.popleft()
            for v in self.neighbors(u):
                if v in seen_v:
                    continue
                seen_v.add(v)
                w = owner.get(v)
                if w is None:
                    return True, reached
                reached.append(w)
                queue.append(w)
        return False, reached

    def _copies_in(self, I, y):
        h = y // self.b
        return sorted(z for z in I if z // self.b == h)

    def can_add(self, I, y):
        if len(self._copies_in(I, y)) >= self.r_cap:
            return False
        return self._alternating(I, y)[0]

    def swappable(self, I, y):
        same = self._copies_in(I, y)
        if len(same) >= self.r_cap:
            # only a same-hyperedge copy can make room; copies are interchangeable
            return same
        aug, reached = self._alternating(I, y)
        return [] if aug else sorted(reached)


def is_independent_cap(M: CapTransversalMatroid, X: Iterable[int]) -> bool:
    return M.is_independent(X)


@dataclass(frozen=True)
class PartitionResult:
    parts: tuple[frozenset[int], ...]

    @property
    def k(self) -> int:
        return len(self.parts)


def rank(oracle: IndependenceOracle, S: Iterable[int]) -> int:
    """Greedy: scan S ascending, keep an element if it stays independent."""
    I: frozenset[int] = frozenset()
    for x in sorted(set(S)):
        if oracle.can_add(I, x):
            I = I | {x}
    return len(I)


def edmonds_partition(oracle: IndependenceOracle, k: int) -> PartitionResult | None:
    """Partition the ground set into k independent sets, or None if impossible.

    Elements are inserted in ascending order. Each insertion runs a BFS in the
    exchange digraph (arc y -> z when z's part stays independent after
    swapping z out for y) until it meets an element that some part can absorb
    directly, then shifts elements along the shortest such path.
    """
    if k < 1:
        raise ParameterError("need k >= 1 parts")
    n = oracle.ground_size
    parts: list[set[int]] = [set() for _ in range(k)]
    where = [-1] * n
    for x in range(n):
        frozen = [frozenset(p) for p in parts]
        prev: dict[int, tuple[int, int] | None] = {x: None}
        queue = deque([x])
        found = None
        while queue:
            y = queue.popleft()
            for i in range(k):
                if i != where[y] and oracle.can_add(frozen[i], y):
                    found = (y, i)
                    break
            if found:
                break
            for i in range(k):
                if i == where[y]:
                    continue
                for z in oracle.swappable(frozen[i], y):
                    if z not in prev:
                        prev[z] = (y, i)
                        queue.append(z)
        if found is None:
            return None
        cur, target = found
        while True:
            old = where[cur]
            if old >= 0:
                parts[old].discard(cur)
            parts[target].add(cur)
            where[cur] = target
            step = prev[cur]
            if step is None:
                break
            cur, via = step
            if via != old:
                raise InternalConsistencyError("exchange path bookkeeping is inconsistent")
            target = old
    result = tuple(frozenset(p) for p in parts)
    for i, p in enumerate(result):
        if not oracle.is_independent(p):
            raise InternalConsistencyError(
                f"part {i} is dependent after augmentation; the oracle is not a matroid"
            )
    return PartitionResult(result)


def _independence_table(oracle: IndependenceOracle, limit: int) -> list[bool]:
    n = oracle.ground_size
    if n > limit:
        raise ParameterError(f"ground set of size {n} exceeds the brute-force limit {limit}")
    return [oracle.is_independent(_members(mask)) for mask in range(1 << n)]


def _members(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _rank_table(indep: list[bool], n: int) -> list[int]:
    rk = [0] * (1 << n)
    for mask in range(1 << n):
        if indep[mask]:
            rk[mask] = bin(mask).count("1")
        else:
            best, m = 0, mask
            while m:
                bit = m & -m
                best = max(best, rk[mask ^ bit])
                m ^= bit
            rk[mask] = best
    return rk


def k_index(oracle: IndependenceOracle, limit: int = 20) -> int | float:
    """max over S of ceil(|S| / r(S)) by enumeration; inf if some element is a loop."""
    n = oracle.ground_size
    rk = _rank_table(_independence_table(oracle, limit), n)
    best = 0
    for mask in range(1, 1 << n):
        size = bin(mask).count("1")
        if rk[mask] == 0:
            return math.inf
        best = max(best, -(-size // rk[mask]))
    return best


def axiom_check(oracle: IndependenceOracle, limit: int = 12) -> bool:
    """Exhaustively test the empty set, downward closure and augmentation.

    Augmentation is checked per independent B: it fails for some A iff the set
    B + {x : B + x dependent} has rank above |B|.
    """
    n = oracle.ground_size
    indep = _independence_table(oracle, limit)
    if not indep[0]:
        return False
    full = (1 << n) - 1
    for mask in range(1 << n):
        if indep[mask]:
            m = mask
            while m:
                bit = m & -m
                if not indep[mask ^ bit]:
                    return False
                m ^= bit
    rk = _rank_table(indep, n)
    for B in range(1 << n):
        if not indep[B]:
            continue
        Z = B
        rest = full & ~B
        while rest:
            bit = rest & -rest
            if not indep[B | bit]:
                Z |= bit
            rest ^= bit
        if rk[Z] > bin(B).count("1"):
            return False
    return True
