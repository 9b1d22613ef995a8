"""Sparse universal hypergraphs for bounded-degree, bounded-density r-graphs.

Stages: ``core`` (hypergraphs, density), ``expander`` (certified regular
hosts), ``matroid`` and ``decompose`` (splitting H into unicyclic graphs and
trees), ``branchwalk`` (random tree walks and their tail behaviour),
``universal`` (the base hypergraph and its blowup) and ``embed``.
"""

from .core import Graph, Hypergraph, RootedTree, max_density
from .decompose import DecompositionCertificate, choose_ab, decompose, verify_certificate
from .errors import (
    CertificationError,
    DecodeError,
    FormatError,
    HyperUniverseError,
    InternalConsistencyError,
    ParameterError,
    RetryExhaustedError,
)
from .expander import SpectralGraph, certify_expander, gen_regular

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "Hypergraph",
    "RootedTree",
    "max_density",
    "DecompositionCertificate",
    "choose_ab",
    "decompose",
    "verify_certificate",
    "SpectralGraph",
    "certify_expander",
    "gen_regular",
    "HyperUniverseError",
    "ParameterError",
    "FormatError",
    "CertificationError",
    "RetryExhaustedError",
    "InternalConsistencyError",
    "DecodeError",
]
