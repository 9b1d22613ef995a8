import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperuniverse.core import Graph
from hyperuniverse.decompose import decompose
from hyperuniverse.embed import (
    CapacityError,
    EmbeddingResult,
    EmbeddingState,
    assemble_f,
    default_K,
    find_phi_level,
    injectify,
    level_bound,
    padded_loads,
    run_embedding,
    transfer_violations,
    verify_embedding,
)
from hyperuniverse.errors import FormatError, ParameterError, RetryExhaustedError
from hyperuniverse.expander import certify_expander
from hyperuniverse.generators import path_tree, random_hypergraph
from hyperuniverse.pipeline import run_pipeline
from hyperuniverse.universal import GammaPrime, blowup_params


class TestInjectify:
    def test_singletons(self):
        assert injectify([(0,), (1,)], 1) == (((0,), 0), ((1,), 0))

    def test_bucket_of_three(self):
        out = injectify([(2, 1), (0, 0), (2, 1), (2, 1)], 3)
        assert [c for p, c in out if p == (2, 1)] == [0, 1, 2]

    def test_capacity(self):
        with pytest.raises(CapacityError):
            injectify([(0,)] * 4, 3)
        with pytest.raises(ParameterError):
            injectify([(0,)], 0)


class TestLevels:
    def test_state_buckets(self):
        s = EmbeddingState(4, 3, 2.0)
        assert s.bucket_map() == {(): (0, 1, 2, 3)}
        s = s.extend([0, 1, 0, 2]).extend([1, 1, 2, 2])
        assert s.bucket_map() == {(0, 1): (0,), (1, 1): (1,), (0, 2): (2,), (2, 2): (3,)}
        assert assemble_f(s) == ((0, 1), (1, 1), (0, 2), (2, 2))
        assert s.max_load() == 1

    def test_generous_k_accepts_first(self):
        G = certify_expander(6, 3, 2.99, 0)
        s = EmbeddingState(5, 6, 6.0)
        _, s2, tries, load = find_phi_level(s, 1, path_tree(5), G)
        assert tries == 1 and load <= 5 and s2.level == 1

    def test_impossible_bound_exhausts(self):
        G = certify_expander(4, 3, 2.99, 0)
        s = EmbeddingState(3, 4, 1e-3)
        with pytest.raises(RetryExhaustedError):
            find_phi_level(s, 1, path_tree(3), G, max_retries=5)

    def test_wrong_level(self):
        G = certify_expander(4, 3, 2.99, 0)
        with pytest.raises(ParameterError):
            find_phi_level(EmbeddingState(3, 4, 2.0), 2, path_tree(3), G)

    def test_padding_never_lowers_load(self):
        s = EmbeddingState(6, 3, 3.0).extend([0, 0, 1, 1, 2, 2])
        phi = [0, 1, 0, 1, 0, 1]
        assert padded_loads(s, phi) >= s.extend(phi).max_load()

    def test_default_k_hits_copy_budget(self):
        n, m, a, copies = 64, 4, 2, 17
        assert level_bound(n, default_K(n, m, a, copies), m, a) == pytest.approx(copies)


def _setup(seed, n=32):
    H = random_hypergraph(n, 3, 2, seed)
    cert = decompose(H, 2, 3)
    G = certify_expander(3, 2, 2 - 1e-9, seed)
    gp = GammaPrime(G.graph, 2, 3, 3, loops=True)
    copies = blowup_params(n, 4)
    emb = run_embedding(H, cert, G, default_K(n, 3, 2, copies), copies, seed)
    return H, cert, G, gp, copies, emb


class TestVerify:
    def test_success(self):
        H, cert, G, gp, copies, emb = _setup(1)
        ok, rep = verify_embedding(H, emb, gp, copies, cert)
        assert ok and rep["fallbacks"] == 0
        assert transfer_violations(cert, emb.f, G) == []
        # without the certificate every edge goes through the oracle
        ok2, rep2 = verify_embedding(H, emb, gp, copies)
        assert ok2 and rep2["fallbacks"] == len(H.edges)

    def test_planted_collision(self):
        H, cert, G, gp, copies, emb = _setup(2)
        fp = list(emb.f_prime)
        w = next(w for w in range(1, H.n) if emb.f[w] == emb.f[0])
        fp[w] = fp[0]
        bad = dataclasses.replace(emb, f_prime=tuple(fp))
        ok, rep = verify_embedding(H, bad, gp, copies, cert)
        assert not ok and rep["reason"] == "injectivity violation"

    def test_planted_missing_edge(self):
        H, cert, G, _, copies, emb = _setup(3)
        # a strict base over an edgeless host has no edges at all
        gp = GammaPrime(Graph(3, ()), 2, 3, 3)
        ok, rep = verify_embedding(H, emb, gp, copies, cert)
        assert not ok and rep["edge"] == 0 and "does not map onto a base edge" in rep["reason"]

    def test_out_of_range(self):
        H, cert, G, gp, copies, emb = _setup(4)
        ok, rep = verify_embedding(H, emb, gp, 1, cert)
        assert not ok

    def test_json_roundtrip(self):
        H, cert, G, gp, copies, emb = _setup(5)
        again = EmbeddingResult.from_json(emb.to_json())
        assert again == emb
        with pytest.raises(FormatError):
            EmbeddingResult.from_json({"version": "2.0"})
        with pytest.raises(FormatError):
            EmbeddingResult.from_json({"version": "1.0", "f": 3})


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_pipeline_end_to_end(seed):
    H = random_hypergraph(32, 3, 2, seed)
    out = run_pipeline(H, "2/3", 8, seed)
    assert out.ok, out.report
    assert out.report["transfer_violations"] == 0
    assert len(set(out.embedding.f_prime)) == H.n
