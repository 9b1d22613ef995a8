"""Embedding a decomposed hypergraph into the blowup.

Level i samples a random T_i-walk phi_i and accepts it when every bucket
S_v^i = {w : (phi_1(w), ..., phi_i(w)) = v} has at most n (K/m)^i vertices.
The product map f = (phi_1, ..., phi_a) sends each hyperedge onto a base
edge, witnessed by the decomposition's forests; distinct copy indices inside
each bucket make it injective.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from . import rng as rngmod
from .branchwalk import sample_twalk
from .core import Hypergraph, RootedTree
from .decompose import DecompositionCertificate
from .errors import FormatError, HyperUniverseError, ParameterError, RetryExhaustedError
from .expander import SpectralGraph
from .universal import GammaPrime, Witness, check_witness, is_gamma_prime_edge

FORMAT_VERSION = "1.0"
DEFAULT_RETRIES = 100
_EPS = 1e-9

Point = tuple[int, ...]


class CapacityError(HyperUniverseError):
    """A bucket holds more vertices than there are copies."""


def level_bound(n: int, K: float, m: int, i: int) -> float:
    return n * (K / m) ** i


@dataclass(frozen=True)
class EmbeddingState:
    n: int
    m: int
    K: float
    phis: tuple[tuple[int, ...], ...] = ()
    buckets: dict | None = field(default=None, compare=False)

    @property
    def level(self) -> int:
        return len(self.phis)

    def bucket_map(self) -> dict[Point, tuple[int, ...]]:
        if self.level == 0:
            return {(): tuple(range(self.n))}
        return self.buckets

    def extend(self, phi) -> "EmbeddingState":
        out: dict[Point, list[int]] = defaultdict(list)
        for prefix, members in self.bucket_map().items():
            for w in members:
                out[prefix + (int(phi[w]),)].append(w)
        return EmbeddingState(
            self.n, self.m, self.K, self.phis + (tuple(int(x) for x in phi),), {k: tuple(v) for k, v in out.items()}
        )

    def max_load(self) -> int:
        return max((len(v) for v in self.bucket_map().values()), default=0)


def padded_loads(state: EmbeddingState, phi) -> int:
    """Worst X(x, v) when each level-(i-1) bucket is padded up to floor(n (K/m)^(i-1))

    with the lowest-indexed vertices outside it.
    """
    size = math.floor(level_bound(state.n, state.K, state.m, state.level) + _EPS)
    worst = 0
    for members in state.bucket_map().values():
        inside = set(members)
        S = list(members)
        for w in range(state.n):
            if len(S) >= size:
                break
            if w not in inside:
                S.append(w)
        counts: dict[int, int] = defaultdict(int)
        for w in S:
            counts[int(phi[w])] += 1
        worst = max(worst, max(counts.values(), default=0))
    return worst


def find_phi_level(
    state: EmbeddingState,
    i: int,
    T: RootedTree,
    G: SpectralGraph,
    max_retries: int = DEFAULT_RETRIES,
    seed: int = 0,
    padded: bool = False,
):
    """Sample T-walks until every level-i bucket fits; returns (walk, new state, attempts, load)."""
    if state.level != i - 1:
        raise ParameterError(f"state is at level {state.level}, cannot sample level {i}")
    bound = level_bound(state.n, state.K, state.m, i)
    worst = None
    for attempt in range(max_retries):
        walk = sample_twalk(T, G, seed, key=(rngmod.EMBED, i, attempt))
        nxt = state.extend(walk.phi)
        load = padded_loads(state, walk.phi) if padded else nxt.max_load()
        if load <= bound + _EPS:
            return walk, nxt, attempt + 1, load
        worst = load if worst is None else min(worst, load)
    raise RetryExhaustedError(
        f"level {i}: no walk with bucket loads <= {bound:.3f} in {max_retries} attempts (best {worst})",
        worst,
    )


def assemble_f(state: EmbeddingState) -> tuple[Point, ...]:
    return tuple(tuple(phi[w] for phi in state.phis) for w in range(state.n))


def injectify(f, copies: int) -> tuple[tuple[Point, int], ...]:
    """Copy indices 0, 1, ... within each bucket in ascending vertex order."""
    if copies < 1:
        raise ParameterError("copies must be >= 1")
    used: dict[Point, int] = defaultdict(int)
    out = []
    for p in f:
        p = tuple(p)
        c = used[p]
        if c >= copies:
            raise CapacityError(f"bucket {p} needs more than {copies} copies")
        used[p] += 1
        out.append((p, c))
    return tuple(out)


@dataclass(frozen=True)
class EmbeddingResult:
    f: tuple[Point, ...]
    f_prime: tuple[tuple[Point, int], ...]
    stats: dict

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "f": [list(p) for p in self.f],
            "f_prime": [[list(p), c] for p, c in self.f_prime],
            "stats": self.stats,
        }

    @classmethod
    def from_json(cls, obj) -> "EmbeddingResult":
        version = str(obj.get("version", "")) if isinstance(obj, dict) else ""
        if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
            raise FormatError(f"unsupported embedding version {version!r}")
        try:
            return cls(
                tuple(tuple(int(x) for x in p) for p in obj["f"]),
                tuple((tuple(int(x) for x in p), int(c)) for p, c in obj["f_prime"]),
                dict(obj.get("stats", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"embedding JSON: {exc}") from None


def default_K(n: int, m: int, a: int, copies: int) -> float:
    """K with n (K/m)^a = copies, so the last level's bound is the copy budget."""
    return m * (copies / n) ** (1.0 / a)


def run_embedding(
    H: Hypergraph,
    cert: DecompositionCertificate,
    G: SpectralGraph,
    K: float,
    copies: int,
    seed: int,
    max_retries: int = DEFAULT_RETRIES,
    padded: bool = False,
) -> EmbeddingResult:
    if cert.n != H.n or len(cert.trees) != cert.a:
        raise ParameterError("certificate does not match the hypergraph")
    state = EmbeddingState(H.n, G.n, float(K))
    attempts, loads = [], []
    for i, T in enumerate(cert.trees, start=1):
        _, state, tries, load = find_phi_level(state, i, T, G, max_retries, seed, padded)
        attempts.append(tries)
        loads.append(load)
    f = assemble_f(state)
    f_prime = injectify(f, copies)
    stats = {
        "K": float(K),
        "copies": copies,
        "m": G.n,
        "seed": seed,
        "attempts": attempts,
        "max_load": loads,
        "bounds": [level_bound(H.n, K, G.n, i) for i in range(1, cert.a + 1)],
        "padded": padded,
    }
    return EmbeddingResult(f, f_prime, stats)


def transfer_violations(cert: DecompositionCertificate, f, G: SpectralGraph) -> list[tuple[int, int, int]]:
    """(level, v, w) for H_i-edges whose images are farther than 2 apart in G."""
    bad = []
    for i, Hi in enumerate(cert.graphs):
        dist_cache: dict[int, list[int]] = {}
        for v, w in Hi.edges:
            x, y = f[v][i], f[w][i]
            if x not in dist_cache:
                dist_cache[x] = G.graph.bfs_distances(x)
            dx = dist_cache[x][y]
            if dx < 0 or dx > 2:
                bad.append((i, v, w))
    return bad


def certificate_witness(H: Hypergraph, cert: DecompositionCertificate, h: int, f) -> tuple[list[Point], Witness]:
    """Points of f(h) and the witness built from the certificate's forests on h."""
    edge = H.edges[h]
    pts = sorted({tuple(f[w]) for w in edge})
    pos = {w: j for j, w in enumerate(edge)}
    forests = tuple(tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in F)) for F in cert.forests[h])
    g = tuple(pts.index(tuple(f[w])) for w in edge)
    return pts, Witness(forests, g)


def verify_embedding(
    H: Hypergraph,
    result: EmbeddingResult,
    gp: GammaPrime,
    copies: int,
    cert: DecompositionCertificate | None = None,
) -> tuple[bool, dict]:
    report = {"ok": False, "reason": None, "edge": None, "fallbacks": 0}
    f, fp = result.f, result.f_prime
    if len(f) != H.n or len(fp) != H.n:
        report["reason"] = "map does not cover V(H)"
        return False, report
    for w in range(H.n):
        p, c = fp[w]
        if tuple(p) != tuple(f[w]):
            report["reason"] = f"f_prime disagrees with f at vertex {w}"
            return False, report
        if not 0 <= c < copies or len(p) != gp.a or any(not 0 <= x < gp.m for x in p):
            report["reason"] = f"vertex {w} maps outside the blowup"
            return False, report
    if len(set(fp)) != H.n:
        report["reason"] = "injectivity violation"
        return False, report
    for h, edge in enumerate(H.edges):
        pts = sorted({tuple(f[w]) for w in edge})
        ok = False
        if cert is not None:
            cpts, wit = certificate_witness(H, cert, h, f)
            ok = check_witness(gp, cpts, wit)[0]
        if not ok:
            report["fallbacks"] += 1
            ok = is_gamma_prime_edge(gp, pts)[0]
        if not ok:
            report["reason"] = f"edge {h} {edge} does not map onto a base edge"
            report["edge"] = h
            return False, report
    report["ok"] = True
    return True, report
