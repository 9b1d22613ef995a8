"""End-to-end construction and embedding at desk scale."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Hypergraph
from .decompose import choose_ab, decompose, verify_certificate
from .embed import default_K, run_embedding, transfer_violations, verify_embedding
from .errors import InternalConsistencyError, ParameterError
from .expander import SpectralGraph, certify_expander, gen_regular
from .universal import (
    GammaPrime,
    base_size,
    blowup_edge_count,
    blowup_params,
    count_bound,
    materialize_gamma_prime,
)

DEFAULT_C = 4.0


def host_degree(m: int, d: int) -> int:
    """Requested degree, capped at m - 1 and lowered by one if m*d is odd."""
    if m < 2:
        raise ParameterError(f"base size m = {m} is too small for a host graph")
    d = min(d, m - 1)
    if (m * d) % 2:
        d -= 1
    if d < 1:
        raise ParameterError(f"no admissible degree for m = {m}")
    return d


@dataclass(frozen=True)
class Construction:
    n: int
    r: int
    a: int
    b: int
    m: int
    d: int
    copies: int
    gamma_prime: GammaPrime

    def edge_count(self) -> int:
        return blowup_edge_count(self.gamma_prime, self.copies)

    def base_bound(self) -> int:
        return count_bound(self.m, self.a, self.r, self.b, self.d)


def construct(n: int, r: int, q, d: int, C: float = DEFAULT_C, seed: int = 0, loops: bool = True) -> Construction:
    """Explicit base hypergraph for n-vertex targets; the host is an uncertified regular graph."""
    a, b = choose_ab(r, Fraction(q))
    m = base_size(n, a)
    dd = host_degree(m, d)
    G = gen_regular(m, dd, seed)
    gp = materialize_gamma_prime(G, a, r, b, loops)
    return Construction(n, r, a, b, m, dd, blowup_params(n, C), gp)


@dataclass(frozen=True)
class PipelineOutcome:
    ok: bool
    cert: object
    host: SpectralGraph
    gamma_prime: GammaPrime
    embedding: object
    report: dict


def run_pipeline(
    H: Hypergraph,
    q,
    d: int,
    seed: int,
    lambda_max: float | None = None,
    K: float | None = None,
    C: float = DEFAULT_C,
    max_retries: int = 100,
    padded: bool = False,
) -> PipelineOutcome:
    """decompose -> expander -> base hypergraph -> embed -> verify.

    Raises the stage's own error on failure (precondition, certification,
    retry exhaustion); a verification failure is returned with ok=False.
    """
    r, n = H.r, H.n
    a, b = choose_ab(r, Fraction(q))
    cert = decompose(H, a, b)
    ok, why = verify_certificate(H, cert)
    if not ok:
        raise InternalConsistencyError(f"decomposition certificate rejected: {why}")
    m = base_size(n, a)
    dd = host_degree(m, d)
    G = certify_expander(m, dd, dd - 1e-9 if lambda_max is None else lambda_max, seed)
    gp = GammaPrime(G.graph, a, r, b, loops=True)
    copies = blowup_params(n, C)
    K = default_K(n, m, a, copies) if K is None else K
    emb = run_embedding(H, cert, G, K, copies, seed, max_retries, padded)
    ok, report = verify_embedding(H, emb, gp, copies, cert)
    D = max(cert.tree_max_degree, 1)
    report.update(
        {
            "a": a,
            "b": b,
            "m": m,
            "d": dd,
            "lambda": G.lam,
            "strict_regime": G.in_strict_regime(D),
            "copies": copies,
            "K": K,
            "transfer_violations": len(transfer_violations(cert, emb.f, G)),
            "tree_max_degree": cert.tree_max_degree,
            "log_n": math.log(n),
        }
    )
    return PipelineOutcome(ok, cert, G, gp, emb, report)
