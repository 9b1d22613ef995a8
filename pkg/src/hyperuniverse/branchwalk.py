"""Random T-walks on regular graphs.

A random T-walk maps the root of T to a uniform vertex of G and every other
tree vertex to a uniform neighbour of its parent's image. This module
samples such walks, enumerates all of them on tiny instances, runs tail
experiments for the number of vertices of a set U landing on a target x, and
implements the depth-first ordering of a vertex set W together with the code
that lets W be rebuilt from part of its elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import binomtest

from . import _kernels
from . import rng as rngmod
from .core import RootedTree
from .errors import DecodeError, InternalConsistencyError, ParameterError
from .expander import SpectralGraph

DEFAULT_K0 = 2**10
DEFAULT_ALPHA = 2.0**-10
ENUM_TREE_LIMIT = 8
ENUM_HOST_LIMIT = 8


@dataclass(frozen=True)
class TWalk:
    tree: RootedTree
    host: SpectralGraph
    phi: tuple[int, ...]
    seed: int

    def is_homomorphism(self) -> bool:
        g = self.host.graph
        return all(
            g.has_edge(self.phi[p], self.phi[v]) for v, p in enumerate(self.tree.parent) if v != p
        )


def _layout(T: RootedTree):
    order = np.array(T.bfs_order, dtype=np.int64)
    pos = np.empty(T.n, dtype=np.int64)
    pos[order] = np.arange(T.n)
    parent_pos = pos[np.array(T.parent, dtype=np.int64)[order]]
    return order, pos, parent_pos


def draw_choices(gen: np.random.Generator, trials: int, N: int, n: int, d: int) -> np.ndarray:
    out = np.empty((trials, N), dtype=np.int64)
    if N:
        out[:, 0] = gen.integers(0, n, size=trials)
        out[:, 1:] = gen.integers(0, d, size=(trials, N - 1))
    return out


def sample_walks(T: RootedTree, G: SpectralGraph, trials: int, seed: int, key: Sequence[int] = ()) -> np.ndarray:
    """``trials`` independent T-walks; row t gives the image of every tree vertex."""
    order, pos, parent_pos = _layout(T)
    gen = rngmod.stream(seed, rngmod.WALK, *key)
    choices = draw_choices(gen, trials, T.n, G.n, G.d)
    phi_bfs = _kernels.walk_images(choices, parent_pos, G.graph.adjacency_array())
    return phi_bfs[:, pos]


def sample_twalk(T: RootedTree, G: SpectralGraph, seed: int, key: Sequence[int] = ()) -> TWalk:
    phi = sample_walks(T, G, 1, seed, key)[0]
    return TWalk(T, G, tuple(int(v) for v in phi), seed)


def count_hits(walk: TWalk, U: Iterable[int], x: int) -> int:
    return sum(1 for u in set(U) if walk.phi[u] == x)


def _u_mask(T: RootedTree, U: Iterable[int], order: np.ndarray) -> np.ndarray:
    U = set(U)
    if any(not 0 <= u < T.n for u in U):
        raise ParameterError("U must be a subset of V(T)")
    return np.array([int(v) in U for v in order], dtype=np.bool_)


def hit_distribution_exact(T: RootedTree, G: SpectralGraph, U: Iterable[int], x: int, chunk: int = 1 << 18):
    """Histogram of X over all n * d^(|T|-1) equally likely walks (integer counts)."""
    order, _, parent_pos = _layout(T)
    mask = _u_mask(T, U, order)
    adj = G.graph.adjacency_array()
    dims = (G.n,) + (G.d,) * (T.n - 1)
    total = math.prod(dims)
    hist = np.zeros(int(mask.sum()) + 1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        choices = np.stack(np.unravel_index(idx, dims), axis=1).astype(np.int64)
        hist += _kernels.hit_histogram(choices, parent_pos, adj, mask, x)
    return hist, total


@dataclass(frozen=True)
class MomentCheck:
    lhs: Fraction
    rhs: float
    hypothesis: bool  # lambda < d / (2^10 D)

    @property
    def holds(self) -> bool:
        return float(self.lhs) <= self.rhs


def moment_rhs(k: int, U_size: int, n: int, D: int, lam: float, d: int) -> float:
    """sum_{i=1..k} C(k-1, i-1) (2^8 |U|/n)^i / i! * (2^9 D lam/d)^(k-i)."""
    z = 2**9 * D * lam / d
    return sum(
        math.comb(k - 1, i - 1) * (2**8 * U_size / n) ** i / math.factorial(i) * z ** (k - i)
        for i in range(1, k + 1)
    )


def moment_sum_exact(T: RootedTree, G: SpectralGraph, U: Iterable[int], x: int, k: int) -> MomentCheck:
    """E[sum over k-subsets W of U of 1{all of W hit x}] = E[C(X, k)], exactly."""
    U = frozenset(U)
    if T.n > ENUM_TREE_LIMIT or G.n > ENUM_HOST_LIMIT:
        raise ParameterError(f"exact enumeration limited to |T| <= {ENUM_TREE_LIMIT}, n <= {ENUM_HOST_LIMIT}")
    if not 1 <= k <= len(U):
        raise ParameterError("need 1 <= k <= |U|")
    hist, total = hit_distribution_exact(T, G, U, x)
    lhs = Fraction(sum(int(c) * math.comb(j, k) for j, c in enumerate(hist)), total)
    D = max(T.max_degree, 1)
    rhs = moment_rhs(k, len(U), G.n, D, G.lam, G.d)
    return MomentCheck(lhs, rhs, G.lam < G.d / (2**10 * D))


@dataclass
class TailResult:
    trials: int
    mu: float
    K: np.ndarray
    exceed_counts: np.ndarray
    exceedance: np.ndarray
    wilson_lo: np.ndarray
    wilson_hi: np.ndarray
    bound: np.ndarray
    K0: float
    kappa: float
    strict_regime: bool
    mean: float
    std_err: float
    decay_rate: float | None
    fitted_K0: float | None
    histogram: np.ndarray
    bound_overrides: dict = field(default_factory=dict)

    def csv_rows(self):
        for i in range(len(self.K)):
            yield (
                float(self.K[i]),
                float(self.exceedance[i]),
                float(self.wilson_lo[i]),
                float(self.wilson_hi[i]),
                float(self.bound[i]),
            )


def tail_bound(K, mu: float, K0: float) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.exp(-(np.asarray(K, dtype=float) - K0) * mu)


def wilson(count: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(count), int(trials)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def fit_decay(K: np.ndarray, exceedance: np.ndarray, counts: np.ndarray, mu: float, min_events: int = 5):
    """Least squares on log-exceedance: log p = -beta * mu * (K - K0_hat).

    Returns (beta, K0_hat), or (None, None) with fewer than two usable points.
    """
    ok = counts >= min_events
    if ok.sum() < 2:
        return None, None
    slope, intercept = np.polyfit(K[ok], np.log(exceedance[ok]), 1)
    if slope == 0:
        return None, None
    return float(-slope / mu), float(-intercept / slope)


def tail_experiment(
    T: RootedTree,
    G: SpectralGraph,
    U: Iterable[int],
    x: int,
    trials: int,
    seed: int,
    K_grid: Sequence[float] | None = None,
    K0: float = DEFAULT_K0,
    K0_overrides: Sequence[float] = (),
    chunk: int = 1 << 16,
    alpha: float = DEFAULT_ALPHA,
) -> TailResult:
    """Empirical Pr[X > K E[X]] over a grid of K, against exp(-(K - K0) E[X]).

    Trials run in fixed-size chunks; chunk c draws from stream (seed, c), so
    results do not depend on how chunks are scheduled. The default grid puts
    K at half-integer multiples of 1/E[X], one point per attainable count.
    """
    if trials < 1:
        raise ParameterError("need at least one trial")
    U = frozenset(U)
    if not U:
        raise ParameterError("U must be non-empty")
    order, _, parent_pos = _layout(T)
    mask = _u_mask(T, U, order)
    adj = G.graph.adjacency_array()
    hist = np.zeros(len(U) + 1, dtype=np.int64)
    for c, start in enumerate(range(0, trials, chunk)):
        gen = rngmod.stream(seed, rngmod.TAIL, c)
        choices = draw_choices(gen, min(chunk, trials - start), T.n, G.n, G.d)
        hist += _kernels.hit_histogram(choices, parent_pos, adj, mask, x)
    mu = len(U) / G.n
    values = np.arange(len(hist))
    mean = float((values * hist).sum() / trials)
    var = float(((values - mean) ** 2 * hist).sum() / max(trials - 1, 1))
    if K_grid is None:
        top = int(np.flatnonzero(hist).max())
        K = (np.arange(top + 1) + 0.5) / mu
    else:
        K = np.sort(np.asarray(K_grid, dtype=float))
    tail = np.cumsum(hist[::-1])[::-1]  # tail[j] = #{X >= j}
    counts = np.array([tail[int(math.floor(k * mu)) + 1] if math.floor(k * mu) + 1 < len(tail) else 0 for k in K])
    exceed = counts / trials
    ci = [wilson(c, trials) for c in counts]
    D = max(T.max_degree, 1)
    beta, k0_hat = fit_decay(K, exceed, counts, mu)
    return TailResult(
        trials=trials,
        mu=mu,
        K=K,
        exceed_counts=counts,
        exceedance=exceed,
        wilson_lo=np.array([c[0] for c in ci]),
        wilson_hi=np.array([c[1] for c in ci]),
        bound=tail_bound(K, mu, K0),
        K0=K0,
        kappa=D * G.lam / G.d,
        strict_regime=G.lam < alpha * G.d / D,
        mean=mean,
        std_err=math.sqrt(var / trials),
        decay_rate=beta,
        fitted_K0=k0_hat,
        histogram=hist,
        bound_overrides={float(k0): tail_bound(K, mu, k0) for k0 in K0_overrides},
    )


# --- depth-first ordering of W and its code -------------------------------------------


@dataclass(frozen=True)
class DfsEncoding:
    """Ordering sigma of W with the traversal record.

    Index j refers to sigma[j]. ``step[j]`` is "root" (root in W, placed at
    initialization), "below" (chosen in the descend step; its iteration is in
    B) or "right" (chosen after a pop; its iteration is in R). ``b[j]`` counts
    steps back from the popped vertex to the branching point h, ``d[j]`` and
    ``c[j]`` give the distance and the 1-based child moves from the start
    vertex (s or h) down to sigma[j].
    """

    sigma: tuple[int, ...]
    B: frozenset[int]
    R: frozenset[int]
    b: tuple[int, ...]
    d: tuple[int, ...]
    c: tuple[tuple[int, ...], ...]
    step: tuple[str, ...]
    t_final: int

    @property
    def k(self) -> int:
        return len(self.sigma)


@dataclass(frozen=True)
class RestrictedCode:
    """The code of W for a bit pattern f: B, R and (b_i, c_i) for the indices with f_i = 1."""

    B: frozenset[int]
    R: frozenset[int]
    b: Mapping[int, int]
    c: Mapping[int, tuple[int, ...]]

    def key(self):
        return (self.B, self.R, tuple(sorted(self.b.items())), tuple(sorted(self.c.items())))


def encode(T: RootedTree, W: Iterable[int]) -> DfsEncoding:
    W = set(W)
    if not W:
        raise ParameterError("W must be non-empty")
    if any(not 0 <= w < T.n for w in W):
        raise ParameterError("W must be a subset of V(T)")
    depth, rank = T.depth, T.rank
    rem = set(W)
    S = [T.root]
    sigma, bs, ds, cs, steps = [], [], [], [], []
    B, R = set(), set()
    if T.root in rem:
        sigma.append(T.root)
        bs.append(0)
        ds.append(0)
        cs.append(())
        steps.append("root")
        rem.discard(T.root)
    t = 0
    while S:
        t += 1
        s = S[-1]
        below = [w for w in rem if T.in_subtree(w, s)]
        if below:
            B.add(t)
            w = min(below, key=lambda v: (depth[v], rank[v]))
            dist = depth[w] - depth[s]
            if dist < 1:
                raise InternalConsistencyError("descend step produced d_j = 0")
            sigma.append(w)
            bs.append(0)
            ds.append(dist)
            cs.append(T.down_path(s, w))
            steps.append("below")
            S.append(w)
            rem.discard(w)
            continue
        S.pop()
        if not S:
            break
        s2 = S[-1]
        right = [u for u in rem if T.in_subtree(u, s2)]
        if not right:
            continue
        R.add(t)
        hs = {u: T.lca(u, s) for u in right}
        u = min(right, key=lambda v: (-depth[hs[v]], depth[v] - depth[hs[v]], rank[v]))
        h = hs[u]
        if h == s:
            raise InternalConsistencyError("branching point coincides with the popped vertex")
        if h != s2:
            S.append(h)
        S.append(u)
        sigma.append(u)
        bs.append(depth[s] - depth[h])
        ds.append(depth[u] - depth[h])
        cs.append(T.down_path(h, u))
        steps.append("right")
        rem.discard(u)
    return DfsEncoding(tuple(sigma), frozenset(B), frozenset(R), tuple(bs), tuple(ds), tuple(cs), tuple(steps), t)


def restrict(enc: DfsEncoding, f: Sequence[int]) -> RestrictedCode:
    if len(f) != enc.k - 1:
        raise ParameterError(f"f must have length k-1 = {enc.k - 1}")
    coded = [j for j in range(1, enc.k) if f[j - 1]]
    return RestrictedCode(enc.B, enc.R, {j: enc.b[j] for j in coded}, {j: enc.c[j] for j in coded})


def uncoded_part(enc: DfsEncoding, f: Sequence[int]) -> frozenset[int]:
    """W restricted to w_0 and the w_j with f_j = 0."""
    return frozenset([enc.sigma[0]] + [enc.sigma[j] for j in range(1, enc.k) if not f[j - 1]])


def decode(T: RootedTree, f: Sequence[int], F: Iterable[int], code: RestrictedCode) -> frozenset[int]:
    """Rebuild W from f, its uncoded part F, and the restricted code."""
    k = len(f) + 1
    depth, rank = T.depth, T.rank
    rem = set(F)
    S = [T.root]
    sigma = []
    if T.root in rem:
        sigma.append(T.root)
        rem.discard(T.root)

    def coded(j):
        return j >= 1 and f[j - 1] == 1

    t = 0
    while S:
        t += 1
        if t > 4 * k + 1:
            raise DecodeError("traversal did not terminate within 4k rounds")
        s = S[-1]
        j = len(sigma)
        if t in code.B:
            if j >= k:
                raise DecodeError("more descend steps than elements")
            if coded(j):
                try:
                    w = T.follow(s, code.c[j])
                except (ParameterError, KeyError) as exc:
                    raise DecodeError(f"bad move sequence at index {j}: {exc}") from None
            else:
                below = [v for v in rem if T.in_subtree(v, s)]
                if not below:
                    raise DecodeError(f"no uncoded vertex below {s} at round {t}")
                w = min(below, key=lambda v: (depth[v], rank[v]))
                rem.discard(w)
            S.append(w)
            sigma.append(w)
            continue
        S.pop()
        if not S:
            break
        if t not in code.R:
            continue
        if j >= k:
            raise DecodeError("more right steps than elements")
        s2 = S[-1]
        if coded(j):
            try:
                h = T.ancestor(s, code.b[j])
                u = T.follow(h, code.c[j])
            except (ParameterError, KeyError) as exc:
                raise DecodeError(f"bad back/move data at index {j}: {exc}") from None
        else:
            right = [v for v in rem if T.in_subtree(v, s2)]
            if not right:
                raise DecodeError(f"no uncoded vertex under {s2} at round {t}")
            hs = {v: T.lca(v, s) for v in right}
            u = min(right, key=lambda v: (-depth[hs[v]], depth[v] - depth[hs[v]], rank[v]))
            h = hs[u]
            rem.discard(u)
        if h != s2:
            S.append(h)
        S.append(u)
        sigma.append(u)
    if len(sigma) != k or rem or len(set(sigma)) != k:
        raise DecodeError("code does not describe a k-element set")
    return frozenset(sigma)


def ordering_is_valid(T: RootedTree, sigma: Sequence[int]) -> bool:
    """w_i is never an ancestor-or-self of an earlier w (w_i not in W_i-up-closure)."""
    for i in range(1, len(sigma)):
        w = sigma[i]
        if any(T.in_subtree(prev, w) for prev in sigma[:i]):
            return False
    return True
