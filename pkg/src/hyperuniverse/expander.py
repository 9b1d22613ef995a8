"""Seeded random regular graphs with a spectral certificate.

Random d-regular graphs have second eigenvalue close to 2*sqrt(d-1) with high
probability; the certificate makes the bound unconditional for the instance
at hand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import LinearOperator, eigsh

from . import rng as rngmod
from .core import Graph
from .errors import CertificationError, FormatError, HyperUniverseError, ParameterError

log = logging.getLogger(__name__)

LAMBDA_SLACK = 1e-6
DENSE_LIMIT = 5000
EXACT_WALK_LIMIT = 64
FORMAT_VERSION = "1.0"


class GenerationError(HyperUniverseError):
    """The pairing process kept getting stuck."""


@dataclass(frozen=True)
class SpectralGraph:
    """A connected d-regular graph with certified ``lam >= |second eigenvalue|``."""

    graph: Graph
    d: int
    lam: float
    seed: int

    @property
    def n(self) -> int:
        return self.graph.n

    def kappa(self, D: int) -> float:
        return D * self.lam / self.d

    def in_strict_regime(self, D: int, alpha: float = 2.0**-10) -> bool:
        """Whether lambda < alpha * d / D, the hypothesis of the tail bound."""
        return self.lam < alpha * self.d / D

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "graph": self.graph.to_json(),
            "d": self.d,
            "lambda": self.lam,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj, recheck: bool = True) -> "SpectralGraph":
        _check_version(obj)
        try:
            graph = Graph.from_json(obj["graph"])
            d, lam, seed = int(obj["d"]), float(obj["lambda"]), int(obj["seed"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"spectral graph JSON: {exc}") from None
        if graph.regular_degree() != d:
            raise FormatError(f"graph is not {d}-regular")
        if recheck and second_eigenvalue(graph) > lam:
            raise FormatError("stored lambda is below the recomputed second eigenvalue")
        return cls(graph, d, lam, seed)


def _check_version(obj):
    version = str(obj.get("version", "")) if isinstance(obj, dict) else ""
    if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
        raise FormatError(f"unsupported artifact version {version!r}")


def _pairing(n: int, d: int, gen: np.random.Generator) -> set[tuple[int, int]] | None:
    # Pair up half-edges in random order, keeping pairs that give a new simple
    # edge and re-pairing the rest; give up when no legal pair is left.
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)
    while stubs.size:
        stubs = gen.permutation(stubs)
        left = []
        for i in range(0, stubs.size, 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            if u > v:
                u, v = v, u
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                left.extend((u, v))
        if left:
            pool = sorted(set(left))
            if not any(
                (a, b) not in edges for i, a in enumerate(pool) for b in pool[i + 1:]
            ):
                return None
        stubs = np.array(left, dtype=np.int64)
    return edges


def gen_regular(n: int, d: int, seed: int, connected: bool = True, max_attempts: int = 1000) -> Graph:
    """Simple d-regular graph on n vertices, a pure function of ``(n, d, seed)``.

    Dense degrees (d > (n-1)/2) are produced as complements of sparse ones;
    d = n-1 is the complete graph.
    """
    if not 0 <= d < n:
        raise ParameterError(f"need 0 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise ParameterError(f"n*d must be even, got n={n}, d={d}")
    if connected and n > 1 and (d == 0 or (d == 1 and n > 2)):
        raise ParameterError(f"no connected {d}-regular graph on {n} vertices")
    if d == n - 1:
        return Graph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))
    if 2 * d > n - 1:
        sparse = gen_regular(n, n - 1 - d, seed, connected=False, max_attempts=max_attempts)
        comp = [(u, v) for u in range(n) for v in range(u + 1, n) if not sparse.has_edge(u, v)]
        # min degree >= n/2 forces connectivity
        return Graph(n, tuple(comp))
    gen = rngmod.stream(seed, rngmod.GRAPH, n, d)
    for _ in range(max_attempts):
        edges = _pairing(n, d, gen)
        if edges is None:
            continue
        g = Graph(n, tuple(sorted(edges)))
        if not connected or g.is_connected():
            return g
    raise GenerationError(f"no {d}-regular graph on {n} vertices after {max_attempts} attempts")


def second_eigenvalue(G: Graph) -> float:
    """Largest absolute adjacency eigenvalue after removing the top eigenvalue d.

    Disconnected or bipartite regular graphs report d.
    """
    d = G.regular_degree()
    if d is None:
        raise ParameterError("second_eigenvalue needs a regular graph")
    n = G.n
    if n <= 1:
        return 0.0
    if n <= DENSE_LIMIT:
        eig = np.linalg.eigvalsh(G.adjacency_matrix())
        return float(np.max(np.abs(eig[:-1])))
    rows = [u for u, v in G.edges] + [v for u, v in G.edges]
    cols = [v for u, v in G.edges] + [u for u, v in G.edges]
    A = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    shift = d / n

    def matvec(x):
        x = np.ravel(x)
        return A @ x - shift * x.sum()

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    vals = eigsh(op, k=1, which="LM", tol=1e-13, return_eigenvectors=False)
    return float(abs(vals[0]))


def certify_expander(n: int, d: int, lambda_max: float, seed: int, attempts: int = 20) -> SpectralGraph:
    """Regenerate with fresh sub-seeds until the second eigenvalue is at most ``lambda_max``.

    The stored ``lam`` is the computed value plus a 1e-6 safety margin.
    Raises CertificationError (with the best value seen) when all attempts fail.
    """
    if not lambda_max < d:
        raise ParameterError(f"lambda_max must be < d, got {lambda_max} >= {d}")
    best = float("inf")
    for attempt in range(attempts):
        sub = rngmod.derive_seed(seed, rngmod.CERTIFY, attempt)
        g = gen_regular(n, d, sub)
        lam = second_eigenvalue(g)
        best = min(best, lam)
        certified = lam + LAMBDA_SLACK
        if certified <= lambda_max and certified < d:
            return SpectralGraph(g, d, certified, sub)
        log.debug("attempt %d: lambda=%.6f > %.6f", attempt, lam, lambda_max)
    raise CertificationError(
        f"no ({n},{d})-graph with lambda <= {lambda_max} in {attempts} attempts (best {best:.6f})",
        best,
    )


def walk_hit_probability(G: SpectralGraph, v: int, w: int, l: int, exact: bool | None = None):
    """Probability that an l-step random walk from v ends at w, and the bound 1/n + (lam/d)^l.

    Uses exact fractions for n <= 64 unless ``exact`` says otherwise.
    """
    if l < 0:
        raise ParameterError("walk length must be non-negative")
    n, d = G.n, G.d
    nb = G.graph.neighbors
    if exact is None:
        exact = n <= EXACT_WALK_LIMIT
    bound = 1.0 / n + (G.lam / d) ** l
    if exact:
        p = [Fraction(0)] * n
        p[v] = Fraction(1)
        for _ in range(l):
            p = [sum((p[u] for u in nb[x]), Fraction(0)) / d for x in range(n)]
        return p[w], bound
    p = np.zeros(n)
    p[v] = 1.0
    P = G.graph.adjacency_matrix() / d
    for _ in range(l):
        p = p @ P
    return float(p[w]), bound


def hitting_bound_violations(G: SpectralGraph, max_len: int = 20, atol: float = 1e-12):
    """All (l, v, w) where the l-step probability exceeds 1/n + (lam/d)^l + atol."""
    n, d = G.n, G.d
    P = G.graph.adjacency_matrix() / d
    M = np.eye(n)
    bad = []
    for l in range(max_len + 1):
        bound = 1.0 / n + (G.lam / d) ** l
        over = np.argwhere(M > bound + atol)
        bad.extend((l, int(a), int(b)) for a, b in over)
        M = M @ P
    return bad
