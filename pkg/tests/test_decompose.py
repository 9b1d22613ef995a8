import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperuniverse.core import Graph, Hypergraph, max_degree, max_density
from hyperuniverse.decompose import (
    DecompositionCertificate,
    choose_ab,
    decompose,
    unicyclic_to_tree,
    verify_certificate,
    weave,
)
from hyperuniverse.errors import FormatError, ParameterError
from hyperuniverse.generators import path_tree, random_hypergraph

FANO = Hypergraph(7, 3, ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)))


def test_choose_ab():
    assert choose_ab(3, Fraction(2, 3)) == (2, 3)
    assert choose_ab(3, Fraction(1)) == (3, 3)
    assert choose_ab(2, Fraction(3, 2)) == (3, 2)
    with pytest.raises(ParameterError):
        choose_ab(3, Fraction(1, 2))


class TestExamples:
    def test_single_edge(self):
        H = Hypergraph(3, 3, ((0, 1, 2),))
        cert = decompose(H, 2, 3)
        assert verify_certificate(H, cert) == (True, None)
        assert sum(len(f) for f in cert.forests[0]) == 3
        assert sorted(len(p) for p in cert.parts) == [1, 2]

    def test_empty(self):
        H = Hypergraph(4, 3, ())
        cert = decompose(H, 2, 3)
        assert all(not g.edges for g in cert.graphs)
        assert verify_certificate(H, cert) == (True, None)

    def test_fano(self):
        assert max_density(FANO) == 1
        cert = decompose(FANO, 3, 3)
        assert verify_certificate(FANO, cert) == (True, None)

    def test_density_too_high(self):
        with pytest.raises(ParameterError):
            decompose(FANO, 2, 3)

    def test_parameter_ranges(self):
        H = Hypergraph(3, 3, ((0, 1, 2),))
        with pytest.raises(ParameterError):
            decompose(H, 2, 2)
        with pytest.raises(ParameterError):
            decompose(H, 1, 3)


class TestPlantedDefects:
    def setup_method(self):
        self.H = random_hypergraph(20, 3, 2, 4)
        self.cert = decompose(self.H, 2, 3)

    def _with_forests(self, h, new):
        forests = list(self.cert.forests)
        forests[h] = new
        return dataclasses.replace(self.cert, forests=tuple(forests))

    def test_forest_with_cycle(self):
        edge = self.H.edges[0]
        tri = ((edge[0], edge[1]), (edge[1], edge[2]), (edge[0], edge[2]))
        bad = self._with_forests(0, (tri,) + self.cert.forests[0][1:])
        ok, why = verify_certificate(self.H, bad)
        assert not ok and why.startswith("forest violation")

    def test_missing_forest_edge(self):
        per = self.cert.forests[0]
        i = next(i for i, f in enumerate(per) if f)
        bad = self._with_forests(0, per[:i] + (per[i][1:],) + per[i + 1:])
        ok, why = verify_certificate(self.H, bad)
        assert not ok and why.startswith("edge-count violation")

    def test_broken_tree(self):
        trees = list(self.cert.trees)
        trees[0] = path_tree(self.H.n)
        ok, why = verify_certificate(self.H, dataclasses.replace(self.cert, trees=tuple(trees)))
        assert not ok and why.startswith("square violation")

    def test_json_roundtrip(self):
        again = DecompositionCertificate.from_json(self.cert.to_json())
        assert verify_certificate(self.H, again) == (True, None)
        assert again.to_json() == self.cert.to_json()
        with pytest.raises(FormatError):
            DecompositionCertificate.from_json({"version": "9.0"})


class TestTrees:
    def test_weave(self):
        assert weave([1, 2, 3, 4]) == [1, 4, 2, 3]
        assert weave([1, 2, 3]) == [1, 3, 2]

    def test_four_cycle(self):
        G = Graph(4, ((0, 1), (1, 2), (2, 3), (0, 3)))
        T = unicyclic_to_tree(G)
        assert all(T.dist(u, v) <= 2 for u, v in G.edges)
        assert len(T.edges()) == 3

    def test_tree_component_kept(self):
        G = Graph(5, ((0, 1), (1, 2), (3, 4)))
        T = unicyclic_to_tree(G)
        assert {(0, 1), (1, 2), (3, 4)} <= set(T.edges())

    def test_rejects_two_cycles(self):
        with pytest.raises(ParameterError):
            unicyclic_to_tree(Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (2, 3))))


@given(st.integers(0, 10**6), st.sampled_from([(2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (4, 4)]), st.integers(6, 40))
def test_decomposition_executable(seed, rD, n):
    r, D = rD
    H = random_hypergraph(n, r, D, seed)
    q = max(Fraction(D, r), Fraction(1, r - 1) + Fraction(1, 6))
    a, b = choose_ab(r, q)
    cert = decompose(H, a, b)
    assert verify_certificate(H, cert) == (True, None)
    for g, T in zip(cert.graphs, cert.trees):
        assert g.max_degree <= 2 * max_degree(H)
        assert all(T.dist(u, v) <= 2 for u, v in g.edges)
