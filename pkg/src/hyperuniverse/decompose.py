"""Split an r-graph of bounded density into unicyclic graphs H_1..H_a.

Every hyperedge h gets b copies in a bipartite lift against V(H). The copies
are partitioned into a independent sets of the capped transversal matroid;
matching each part into V(H) and joining every matched vertex to its cyclic
successor inside h gives H_i. Copies of h in part i trace a forest on h.
Finally each H_i is turned into a spanning tree T_i with H_i inside T_i^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Graph, Hypergraph, RootedTree, is_unicyclic_components, max_degree, max_density
from .errors import FormatError, InternalConsistencyError, ParameterError
from .matroid import CapTransversalMatroid, edmonds_partition

FORMAT_VERSION = "1.0"

Edge = tuple[int, int]


@dataclass(frozen=True)
class DecompositionCertificate:
    """Witness for the decomposition of one hypergraph.

    ``parts[i]`` holds (hyperedge index, copy index) pairs; ``matchings[i]``
    maps each of them to a vertex. ``forests[h][i]`` is the forest on
    hyperedge h that lives in ``graphs[i]``. Cyclic orders are ascending
    vertex order within each hyperedge.
    """

    n: int
    r: int
    a: int
    b: int
    parts: tuple[tuple[tuple[int, int], ...], ...]
    matchings: tuple[dict, ...]
    graphs: tuple[Graph, ...]
    forests: tuple[tuple[tuple[Edge, ...], ...], ...]
    trees: tuple[RootedTree, ...]

    @property
    def tree_max_degree(self) -> int:
        return max((t.max_degree for t in self.trees), default=0)

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "n": self.n,
            "r": self.r,
            "a": self.a,
            "b": self.b,
            "parts": [[list(u) for u in part] for part in self.parts],
            "matchings": [[[h, c, m[(h, c)]] for (h, c) in sorted(m)] for m in self.matchings],
            "graphs": [[list(e) for e in g.edges] for g in self.graphs],
            "forests": [[[list(e) for e in f] for f in per_h] for per_h in self.forests],
            "trees": [t.to_json() for t in self.trees],
        }

    @classmethod
    def from_json(cls, obj) -> "DecompositionCertificate":
        version = str(obj.get("version", "")) if isinstance(obj, dict) else ""
        if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
            raise FormatError(f"unsupported certificate version {version!r}")
        try:
            n = int(obj["n"])
            return cls(
                n=n,
                r=int(obj["r"]),
                a=int(obj["a"]),
                b=int(obj["b"]),
                parts=tuple(tuple((int(h), int(c)) for h, c in p) for p in obj["parts"]),
                matchings=tuple({(int(h), int(c)): int(v) for h, c, v in m} for m in obj["matchings"]),
                graphs=tuple(Graph(n, tuple(tuple(e) for e in g)) for g in obj["graphs"]),
                forests=tuple(
                    tuple(tuple((int(u), int(v)) for u, v in f) for f in per_h) for per_h in obj["forests"]
                ),
                trees=tuple(RootedTree.from_json(t) for t in obj["trees"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"certificate JSON: {exc}") from None


def choose_ab(r: int, q: Fraction) -> tuple[int, int]:
    """Smallest b > r-1 with q*b integral, and a = q*b."""
    q = Fraction(q)
    if r < 2:
        raise ParameterError("need r >= 2")
    if q <= Fraction(1, r - 1):
        raise ParameterError(f"need q > 1/(r-1) = 1/{r - 1}, got {q}")
    den = q.denominator
    b = den * -(-r // den)
    if b > 10**6:
        raise ParameterError(f"no admissible b <= 10^6 for q = {q}")
    return int(q * b), b


def successor(edge: tuple[int, ...], v: int) -> int:
    """Next vertex after v in the ascending cyclic order of ``edge``."""
    i = edge.index(v)
    return edge[(i + 1) % len(edge)]


def _cycle_of(G: Graph, comp: list[int]) -> list[int] | None:
    # strip leaves; what survives in a unicyclic component is its cycle
    deg = {v: len(G.neighbors[v]) for v in comp}
    alive = set(comp)
    stack = [v for v in comp if deg[v] <= 1]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in G.neighbors[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] <= 1:
                    stack.append(w)
    if not alive:
        return None
    start = min(alive)
    nxt = min(w for w in G.neighbors[start] if w in alive)
    cycle = [start]
    prev, cur = start, nxt
    while cur != start:
        cycle.append(cur)
        prev, cur = cur, next(w for w in G.neighbors[cur] if w in alive and w != prev)
    return cycle


def weave(cycle: list[int]) -> list[int]:
    """x1, xl, x2, x(l-1), ...: consecutive cycle vertices end up at distance <= 2."""
    out = []
    lo, hi = 0, len(cycle) - 1
    while lo <= hi:
        out.append(cycle[lo])
        if lo != hi:
            out.append(cycle[hi])
        lo += 1
        hi -= 1
    return out


def unicyclic_to_tree(Hi: Graph, n: int | None = None) -> RootedTree:
    """Spanning tree T rooted at 0 with every edge of Hi at T-distance <= 2.

    Each cycle is replaced by its weave; components are then chained by
    joining a minimum-degree vertex of the tree built so far to a
    minimum-degree vertex of the next component (ties to the lowest index).
    """
    n = Hi.n if n is None else n
    if n != Hi.n:
        raise ParameterError(f"graph has {Hi.n} vertices, expected {n}")
    if not is_unicyclic_components(Hi):
        raise ParameterError("input has a component with more than one cycle")
    edges = set(Hi.edges)
    comps = Hi.components()
    for comp in comps:
        cycle = _cycle_of(Hi, comp)
        if cycle is None:
            continue
        for x, y in zip(cycle, cycle[1:] + cycle[:1]):
            edges.discard((min(x, y), max(x, y)))
        path = weave(cycle)
        for x, y in zip(path, path[1:]):
            edges.add((min(x, y), max(x, y)))
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    comps.sort(key=min)
    built = list(comps[0]) if comps else []
    for comp in comps[1:]:
        u = min(built, key=lambda v: (deg[v], v))
        w = min(comp, key=lambda v: (deg[v], v))
        edges.add((min(u, w), max(u, w)))
        deg[u] += 1
        deg[w] += 1
        built.extend(comp)
    return RootedTree.from_edges(n, sorted(edges), root=0)


def decompose(H: Hypergraph, a: int, b: int) -> DecompositionCertificate:
    r = H.r
    if r < 2 or not H.is_uniform:
        raise ParameterError("decompose needs an r-uniform hypergraph with r >= 2")
    if not b > r - 1:
        raise ParameterError(f"need b > r-1, got b={b}, r={r}")
    if not a * (r - 1) > b:
        raise ParameterError(f"need a > b/(r-1), got a={a}, b={b}, r={r}")
    density = max_density(H)
    if density > Fraction(a, b):
        raise ParameterError(f"m(H) = {density} exceeds a/b = {a}/{b}")

    M = CapTransversalMatroid(H, b)
    partition = edmonds_partition(M, a)
    if partition is None:
        raise InternalConsistencyError(
            "capped transversal matroid has no partition into a parts although m(H) <= a/b"
        )
    parts, matchings, graphs = [], [], []
    forests = [[[] for _ in range(a)] for _ in H.edges]
    for i, part in enumerate(partition.parts):
        m = M.matching(part)
        if len(m) != len(part):
            raise InternalConsistencyError(f"part {i} is independent but has no saturating matching")
        pairs = tuple(sorted((u // b, u % b) for u in part))
        parts.append(pairs)
        matchings.append({(u // b, u % b): m[u] for u in part})
        gedges = set()
        for u in sorted(part):
            h = u // b
            x = m[u]
            y = successor(H.edges[h], x)
            e = (min(x, y), max(x, y))
            gedges.add(e)
            forests[h][i].append(e)
        graphs.append(Graph(H.n, tuple(sorted(gedges))))
    trees = tuple(unicyclic_to_tree(g, H.n) for g in graphs) if H.n else ()
    return DecompositionCertificate(
        n=H.n,
        r=r,
        a=a,
        b=b,
        parts=tuple(parts),
        matchings=tuple(matchings),
        graphs=tuple(graphs),
        forests=tuple(tuple(tuple(sorted(f)) for f in per_h) for per_h in forests),
        trees=trees,
    )


def _is_forest(n_edges: list[Edge]) -> bool:
    root: dict[int, int] = {}

    def find(x):
        root.setdefault(x, x)
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    for u, v in n_edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        root[ru] = rv
    return True


def verify_certificate(H: Hypergraph, cert: DecompositionCertificate) -> tuple[bool, str | None]:
    """Check every certificate invariant; return (ok, first violation)."""
    a, b, r = cert.a, cert.b, cert.r
    if cert.n != H.n or r != H.r:
        return False, "shape violation: certificate does not match hypergraph"
    if not (len(cert.parts) == len(cert.matchings) == len(cert.graphs) == a):
        return False, "shape violation: expected a parts, matchings and graphs"
    if len(cert.forests) != H.num_edges or any(len(f) != a for f in cert.forests):
        return False, "shape violation: forests must be indexed by hyperedge and part"
    if H.n and len(cert.trees) != a:
        return False, "shape violation: expected a trees"

    seen = [pair for part in cert.parts for pair in part]
    expected = {(h, c) for h in range(H.num_edges) for c in range(b)}
    if len(seen) != len(set(seen)) or set(seen) != expected:
        return False, "partition violation: parts do not partition the copies"

    D = max_degree(H)
    for i, (part, m, g) in enumerate(zip(cert.parts, cert.matchings, cert.graphs)):
        per_edge: dict[int, int] = {}
        for h, _ in part:
            per_edge[h] = per_edge.get(h, 0) + 1
            if per_edge[h] > r - 1:
                return False, f"cap violation: part {i} holds more than r-1 copies of hyperedge {h}"
        if set(m) != set(part):
            return False, f"matching violation: part {i} matching domain differs from the part"
        if len(set(m.values())) != len(m):
            return False, f"matching violation: part {i} matching is not injective"
        arcs = set()
        for (h, c), x in m.items():
            if x not in H.edges[h]:
                return False, f"matching violation: copy ({h},{c}) matched outside its hyperedge"
            y = successor(H.edges[h], x)
            arcs.add((min(x, y), max(x, y)))
        if arcs != set(g.edges):
            return False, f"edge-rule violation: H_{i} differs from the matched successor edges"
        if not is_unicyclic_components(g):
            return False, f"unicyclic violation: H_{i} has a component with two cycles"
        if g.max_degree > 2 * D:
            return False, f"degree violation: H_{i} has degree {g.max_degree} > 2D = {2 * D}"

    for h, per_part in enumerate(cert.forests):
        total = 0
        for i, f in enumerate(per_part):
            f = list(f)
            gset = cert.graphs[i].edge_set
            if any(u not in H.edges[h] or v not in H.edges[h] for u, v in f):
                return False, f"forest violation: F_{i}^({h}) leaves its hyperedge"
            if any((min(u, v), max(u, v)) not in gset for u, v in f):
                return False, f"forest violation: F_{i}^({h}) is not contained in H_{i}"
            if not _is_forest(f):
                return False, f"forest violation: F_{i}^({h}) contains a cycle"
            total += len(f)
        if total != b:
            return False, f"edge-count violation: hyperedge {h} forests have {total} != b = {b} edges"

    for i, (g, t) in enumerate(zip(cert.graphs, cert.trees)):
        if t.n != H.n:
            return False, f"tree violation: T_{i} does not span V(H)"
        for u, v in g.edges:
            if t.dist(u, v) > 2:
                return False, f"square violation: edge ({u},{v}) of H_{i} is at distance > 2 in T_{i}"
    return True, None
