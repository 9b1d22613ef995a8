"""The base hypergraph on [m]^a and its blowup.

Points are a-tuples over V(G). A set P of at most r points is an edge of the
base hypergraph when some surjection g from [r] onto P and some forests
F_1..F_a on [r] with at least b edges in total make every coordinate map
j -> g(j)_i a homomorphism of F_i into G^2. The blowup replaces each point by
``copies`` vertices and each edge by all r-subsets of the union of its copy
sets; it is only ever counted, never listed.

``loops`` selects the target of the coordinate homomorphisms: the simple
square (distinct vertices at distance <= 2) or the closed square, which also
lets adjacent forest vertices share an image. Tree walks can put two vertices
at distance two in T on the same vertex of G, so the embedding needs the
closed version.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import Graph, square
from .errors import FormatError, ParameterError

FORMAT_VERSION = "1.0"
MATERIALIZE_LIMIT = 10**5

Forest = tuple[tuple[int, int], ...]
Point = tuple[int, ...]


def _acyclic(r: int, edges: Sequence[tuple[int, int]]) -> bool:
    root = list(range(r))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for u, v in edges:
        a, b = find(u), find(v)
        if a == b:
            return False
        root[a] = b
    return True


def forests_on(r: int) -> list[Forest]:
    """All labeled forests on [r] (as sorted edge tuples), by edge count then lexicographically."""
    pairs = list(itertools.combinations(range(r), 2))
    out = []
    for k in range(r):
        out.extend(c for c in itertools.combinations(pairs, k) if _acyclic(r, c))
    return out


def components(r: int, forest: Forest) -> int:
    return r - len(forest)


def enumerate_forest_tuples(r: int, a: int, b: int, exact: bool = False) -> list[tuple[Forest, ...]]:
    """All a-tuples of labeled forests on [r] with total edge count >= b (== b if ``exact``)."""
    if b > a * (r - 1):
        return []
    pool = forests_on(r)
    return [
        t
        for t in itertools.product(pool, repeat=a)
        if (sum(map(len, t)) == b if exact else sum(map(len, t)) >= b)
    ]


@dataclass(frozen=True)
class GammaPrime:
    host: Graph
    a: int
    r: int
    b: int
    loops: bool = False
    edges: frozenset[frozenset[Point]] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.a < 1 or self.r < 2 or self.b < 0:
            raise ParameterError("need a >= 1, r >= 2, b >= 0")

    @property
    def m(self) -> int:
        return self.host.n

    @property
    def d(self) -> int:
        return self.host.max_degree

    @cached_property
    def host_square(self) -> Graph:
        return square(self.host)

    @cached_property
    def _adj(self) -> np.ndarray:
        A = np.zeros((self.m, self.m), dtype=bool)
        for u, v in self.host_square.edges:
            A[u, v] = A[v, u] = True
        if self.loops:
            np.fill_diagonal(A, True)
        return A

    def adjacent(self, x: int, y: int) -> bool:
        return bool(self._adj[x, y])

    @cached_property
    def forest_index(self) -> list[tuple[Forest, ...]]:
        return enumerate_forest_tuples(self.r, self.a, self.b)

    @property
    def explicit(self) -> bool:
        return self.edges is not None

    def to_json(self) -> dict:
        out = {
            "version": FORMAT_VERSION,
            "host": self.host.to_json(),
            "m": self.m,
            "a": self.a,
            "r": self.r,
            "b": self.b,
            "loops": self.loops,
            "host_square": [list(e) for e in self.host_square.edges],
            "forest_index": [[[list(e) for e in F] for F in t] for t in self.forest_index],
        }
        if self.edges is not None:
            out["edges"] = sorted(sorted(list(p) for p in e) for e in self.edges)
        return out

    @classmethod
    def from_json(cls, obj) -> "GammaPrime":
        version = str(obj.get("version", "")) if isinstance(obj, dict) else ""
        if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
            raise FormatError(f"unsupported gamma version {version!r}")
        try:
            edges = obj.get("edges")
            if edges is not None:
                edges = frozenset(frozenset(tuple(int(x) for x in p) for p in e) for e in edges)
            return cls(
                Graph.from_json(obj["host"]),
                int(obj["a"]),
                int(obj["r"]),
                int(obj["b"]),
                bool(obj.get("loops", False)),
                edges,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"gamma JSON: {exc}") from None


@dataclass(frozen=True)
class Witness:
    """Forest tuple plus the assignment j -> points[g[j]] of [r] to the points."""

    forests: tuple[Forest, ...]
    g: tuple[int, ...]


def _check_points(gp: GammaPrime, points) -> list[Point]:
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if not 1 <= len(pts) <= gp.r:
        raise ParameterError(f"need between 1 and r = {gp.r} distinct points")
    for p in pts:
        if len(p) != gp.a or any(not 0 <= x < gp.m for x in p):
            raise ParameterError(f"point {p} is not in [m]^a with m={gp.m}, a={gp.a}")
    return pts


def _surjections(r: int, k: int):
    for g in itertools.product(range(k), repeat=r):
        if len(set(g)) == k:
            yield g


def _spanning_forest(r: int, ok) -> Forest:
    # BFS forest of the graph on [r] with edge predicate ok(j, l)
    seen = [False] * r
    edges = []
    for s in range(r):
        if seen[s]:
            continue
        seen[s] = True
        stack = [s]
        while stack:
            j = stack.pop()
            for l in range(r):
                if not seen[l] and ok(j, l):
                    seen[l] = True
                    edges.append((min(j, l), max(j, l)))
                    stack.append(l)
    return tuple(sorted(edges))


def is_gamma_prime_edge(gp: GammaPrime, points: Iterable[Sequence[int]]):
    """(True, Witness) if the points form an edge, else (False, None).

    For a fixed assignment g the best forest in coordinate i is a spanning
    forest of the compatibility graph on [r] (j ~ l when g(j)_i and g(l)_i are
    adjacent in the square), so it suffices to search over assignments.
    """
    pts = _check_points(gp, points)
    r, a = gp.r, gp.a
    for g in _surjections(r, len(pts)):
        forests = []
        for i in range(a):
            col = [pts[g[j]][i] for j in range(r)]
            forests.append(_spanning_forest(r, lambda j, l: gp.adjacent(col[j], col[l])))
        if sum(map(len, forests)) >= gp.b:
            return True, Witness(tuple(forests), g)
    return False, None


def check_witness(gp: GammaPrime, points: Iterable[Sequence[int]], w: Witness) -> tuple[bool, str | None]:
    pts = _check_points(gp, points)
    r = gp.r
    if len(w.forests) != gp.a:
        return False, "wrong number of forests"
    if len(w.g) != r or set(w.g) != set(range(len(pts))):
        return False, "assignment is not a surjection onto the points"
    total = 0
    for i, F in enumerate(w.forests):
        if any(not (0 <= u < r and 0 <= v < r and u != v) for u, v in F) or not _acyclic(r, F):
            return False, f"coordinate {i}: not a forest on [r]"
        total += len(F)
        for u, v in F:
            if not gp.adjacent(pts[w.g[u]][i], pts[w.g[v]][i]):
                return False, f"coordinate {i}: edge {(u, v)} not preserved"
    if total < gp.b:
        return False, "forest tuple has fewer than b edges"
    return True, None


def forest_homomorphisms(gp: GammaPrime, F: Forest) -> list[tuple[int, ...]]:
    """All maps [r] -> V(G) sending edges of F to edges of the (simple or closed) square."""
    r = gp.r
    nb = [np.flatnonzero(gp._adj[x]).tolist() for x in range(gp.m)]
    adj = [[] for _ in range(r)]
    for u, v in F:
        adj[u].append(v)
        adj[v].append(u)
    order, parent = [], [-1] * r
    seen = [False] * r
    for s in range(r):
        if seen[s]:
            continue
        seen[s] = True
        queue = [s]
        while queue:
            j = queue.pop(0)
            order.append(j)
            for l in adj[j]:
                if not seen[l]:
                    seen[l] = True
                    parent[l] = j
                    queue.append(l)
    out = []
    img = [0] * r

    def rec(k):
        if k == r:
            out.append(tuple(img))
            return
        j = order[k]
        options = range(gp.m) if parent[j] < 0 else nb[img[parent[j]]]
        for x in options:
            img[j] = x
            rec(k + 1)

    rec(0)
    return out


def materialize_gamma_prime(host: Graph, a: int, r: int, b: int, loops: bool = False) -> GammaPrime:
    """Explicit edge list, by pushing every forest tuple through all its homomorphisms.

    Tuples with exactly b edges suffice: dropping edges from a witness keeps
    it a witness.
    """
    if host.n**a > MATERIALIZE_LIMIT:
        raise ParameterError(f"m^a = {host.n**a} exceeds {MATERIALIZE_LIMIT}; use membership queries")
    gp = GammaPrime(host, a, r, b, loops)
    cache: dict[Forest, list[tuple[int, ...]]] = {}
    edges: set[frozenset[Point]] = set()
    for t in enumerate_forest_tuples(r, a, b, exact=True):
        homs = [cache.setdefault(F, forest_homomorphisms(gp, F)) for F in t]
        for combo in itertools.product(*homs):
            edges.add(frozenset(tuple(combo[i][j] for i in range(a)) for j in range(r)))
    return GammaPrime(host, a, r, b, loops, frozenset(edges))


def count_bound(m: int, a: int, r: int, b: int, d: int) -> int:
    """r^(ra) m^(ra-b) d^(2ra): the counting bound for the base hypergraph."""
    return r ** (r * a) * m ** (r * a - b) * d ** (2 * r * a)


def count_bound_short(m: int, a: int, r: int, b: int, d: int) -> int:
    """Same bound with the leading factor printed as r^a in the closed form."""
    return r**a * m ** (r * a - b) * d ** (2 * r * a)


def base_size(n: int, a: int) -> int:
    """m = (n / ln n)^(1/a), rounded to the nearest integer >= 1."""
    if n < 2:
        raise ParameterError("need n >= 2")
    return max(1, round((n / math.log(n)) ** (1.0 / a)))


def blowup_params(n: int, C: float) -> int:
    """copies = ceil(C ln n), at least 1."""
    if n < 2:
        raise ParameterError("need n >= 2")
    return max(1, math.ceil(C * math.log(n) - 1e-12))


def gamma_edge_count_bound(n: int, r: int, q, C_total: float) -> float:
    """C n^(r - 1/q) (ln n)^(1/q)."""
    q = Fraction(q)
    if q <= Fraction(1, r - 1):
        raise ParameterError(f"need q > 1/(r-1), got {q}")
    inv = 1 / float(q)
    return C_total * n ** (r - inv) * math.log(n) ** inv


def downsets(edges: Iterable[frozenset[Point]]) -> set[frozenset[Point]]:
    out: set[frozenset[Point]] = set()
    for e in edges:
        items = sorted(e)
        for k in range(1, len(items) + 1):
            out.update(frozenset(c) for c in itertools.combinations(items, k))
    return out


def blowup_edge_count(gp: GammaPrime, copies: int) -> int:
    """Exact number of r-sets in the blowup.

    An r-set of blown-up vertices is an edge iff its set of underlying points
    lies inside some base edge. Sets over exactly the points Q number
    sum_j (-1)^j C(|Q|, j) C((|Q| - j) copies, r).
    """
    if gp.edges is None:
        raise ParameterError("edge counting needs an explicit (materialized) base hypergraph")
    r = gp.r
    by_size: dict[int, int] = {}
    for Q in downsets(gp.edges):
        by_size[len(Q)] = by_size.get(len(Q), 0) + 1
    total = 0
    for s, cnt in by_size.items():
        exact = sum((-1) ** j * math.comb(s, j) * math.comb((s - j) * copies, r) for j in range(s + 1))
        total += cnt * exact
    return total


def blowup_edge_bound(gp: GammaPrime, copies: int) -> int:
    """|E(base)| (r copies)^r, the blowup factor applied to the base count."""
    if gp.edges is None:
        raise ParameterError("needs an explicit base hypergraph")
    return len(gp.edges) * (gp.r * copies) ** gp.r


def is_gamma_edge(gp: GammaPrime, vertices: Iterable[tuple[Sequence[int], int]], copies: int) -> bool:
    """Membership of an r-set of blown-up vertices (point, copy index).

    The underlying points Q need only lie inside some base edge, so without
    an explicit edge list this searches the supersets of Q of size <= r.
    """
    vs = {(tuple(p), int(c)) for p, c in vertices}
    if len(vs) != gp.r or any(not 0 <= c < copies for _, c in vs):
        return False
    Q = frozenset(p for p, _ in vs)
    if gp.edges is not None:
        return any(Q <= e for e in gp.edges)
    others = [p for p in itertools.product(range(gp.m), repeat=gp.a) if p not in Q]
    for extra in range(gp.r - len(Q) + 1):
        for add in itertools.combinations(others, extra):
            if is_gamma_prime_edge(gp, Q | set(add))[0]:
                return True
    return False
