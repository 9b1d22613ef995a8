import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperuniverse.core import Graph
from hyperuniverse.errors import CertificationError, FormatError, ParameterError
from hyperuniverse.expander import (
    SpectralGraph,
    certify_expander,
    gen_regular,
    hitting_bound_violations,
    second_eigenvalue,
    walk_hit_probability,
)

from oracles import regular_graphs_up_to_6


def spectral(G: Graph) -> SpectralGraph:
    d = G.regular_degree()
    return SpectralGraph(G, d, second_eigenvalue(G) + 1e-6, 0)


class TestGenRegular:
    def test_k4(self):
        G = gen_regular(4, 3, 7)
        assert len(G.edges) == 6

    def test_connected_cycle(self):
        G = gen_regular(6, 2, 3)
        assert G.regular_degree() == 2 and G.is_connected()

    def test_parity(self):
        with pytest.raises(ParameterError):
            gen_regular(5, 3, 0)

    @given(st.integers(4, 40), st.integers(2, 12), st.integers(0, 2**32 - 1))
    def test_regular_simple_deterministic(self, n, d, seed):
        if d >= n or (n * d) % 2:
            return
        G = gen_regular(n, d, seed)
        assert G.regular_degree() == d and G.is_connected()
        assert gen_regular(n, d, seed) == G


class TestSecondEigenvalue:
    def test_closed_forms(self):
        g = regular_graphs_up_to_6()
        assert second_eigenvalue(g["K4"]) == pytest.approx(1.0, abs=1e-9)
        assert second_eigenvalue(g["C6"]) == pytest.approx(2.0, abs=1e-9)
        assert second_eigenvalue(g["K33"]) == pytest.approx(3.0, abs=1e-9)

    def test_cycle_spectrum(self):
        n = 9
        G = Graph(n, tuple(sorted((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n))))
        expected = max(abs(2 * math.cos(2 * math.pi * k / n)) for k in range(1, n))
        assert second_eigenvalue(G) == pytest.approx(expected, abs=1e-9)

    def test_sparse_path_matches_dense(self, monkeypatch):
        from hyperuniverse import expander

        G = gen_regular(300, 6, 11)
        dense = second_eigenvalue(G)
        monkeypatch.setattr(expander, "DENSE_LIMIT", 10)
        assert second_eigenvalue(G) == pytest.approx(dense, abs=1e-8)

    def test_non_regular(self):
        with pytest.raises(ParameterError):
            second_eigenvalue(Graph(3, ((0, 1),)))


class TestCertify:
    def test_k4_accepted(self):
        G = certify_expander(4, 3, 1.5, 0)
        assert G.lam == pytest.approx(1.0, abs=1e-5) and G.lam >= 1.0

    def test_k4_rejected_reports_best(self):
        with pytest.raises(CertificationError) as info:
            certify_expander(4, 3, 0.5, 0)
        assert info.value.best_lambda == pytest.approx(1.0, abs=1e-9)

    def test_alon_boppana_floor(self):
        with pytest.raises(CertificationError) as info:
            certify_expander(30, 3, 0.1, 0, attempts=3)
        assert info.value.best_lambda > 2.0

    def test_lambda_max_must_be_below_d(self):
        with pytest.raises(ParameterError):
            certify_expander(4, 3, 3.0, 0)

    def test_json_roundtrip_and_recheck(self):
        G = certify_expander(20, 4, 3.9, 5)
        assert SpectralGraph.from_json(G.to_json()) == G
        bad = G.to_json()
        bad["lambda"] = 0.5
        with pytest.raises(FormatError):
            SpectralGraph.from_json(bad)
        bad = G.to_json()
        bad["version"] = "2.0"
        with pytest.raises(FormatError):
            SpectralGraph.from_json(bad)


class TestWalkProbabilities:
    def test_k4(self):
        G = spectral(regular_graphs_up_to_6()["K4"])
        assert walk_hit_probability(G, 0, 0, 1)[0] == 0
        p, bound = walk_hit_probability(G, 0, 1, 1)
        assert p == Fraction(1, 3) and bound == pytest.approx(0.25 + G.lam / 3)

    def test_c6_two_steps(self):
        G = spectral(regular_graphs_up_to_6()["C6"])
        p, bound = walk_hit_probability(G, 0, 0, 2)
        assert p == Fraction(1, 2) and bound > 1

    def test_float_path_agrees(self):
        G = certify_expander(30, 4, 3.99, 1)
        for l in (0, 1, 5):
            exact, _ = walk_hit_probability(G, 0, 3, l, exact=True)
            approx, _ = walk_hit_probability(G, 0, 3, l, exact=False)
            assert approx == pytest.approx(float(exact), abs=1e-12)

    def test_bound_holds_on_random_expander(self):
        G = certify_expander(60, 5 + 1, 5.9, 2)
        assert hitting_bound_violations(G, 20) == []

    def test_rows_are_distributions(self):
        G = certify_expander(16, 3, 2.99, 4)
        total = sum(walk_hit_probability(G, 2, w, 4)[0] for w in range(G.n))
        assert total == 1
        assert np.isclose(sum(walk_hit_probability(G, 2, w, 4, exact=False)[0] for w in range(G.n)), 1)
