import itertools

from hypothesis import given
from hypothesis import strategies as st

from hyperuniverse.core import Graph, Hypergraph, max_density
from hyperuniverse.generators import random_hypergraph
from hyperuniverse.matroid import (
    CapTransversalMatroid,
    FunctionOracle,
    GraphicMatroid,
    axiom_check,
    edmonds_partition,
    is_independent_cap,
    k_index,
    max_bipartite_matching,
    rank,
)

from oracles import hall_independent, partition_feasible_by_flow


def K(n):
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


TRIANGLE = Graph(3, ((0, 1), (0, 2), (1, 2)))
ONE_EDGE = Hypergraph(3, 3, ((0, 1, 2),))


@st.composite
def small_cap_matroids(draw):
    r = draw(st.sampled_from([2, 3]))
    b = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(r, 6))
    pool = list(itertools.combinations(range(n), r))
    e = draw(st.integers(1, min(len(pool), 12 // b)))
    edges = draw(st.lists(st.sampled_from(pool), min_size=e, max_size=e, unique=True))
    return CapTransversalMatroid(Hypergraph(n, r, tuple(edges)), b)


class TestMatching:
    def test_perfect(self):
        m = max_bipartite_matching({0: [0, 1], 1: [0], 2: [1, 2]})
        assert len(m) == 3 and len(set(m.values())) == 3

    def test_deficient(self):
        assert len(max_bipartite_matching({0: ["a"], 1: ["a"], 2: ["a", "b"]})) == 2

    def test_empty(self):
        assert max_bipartite_matching({}) == {}


class TestCapTransversal:
    def test_examples(self):
        M = CapTransversalMatroid(ONE_EDGE, 3)
        assert is_independent_cap(M, [])
        assert not is_independent_cap(M, [0, 1, 2])
        assert is_independent_cap(M, [0, 1])
        assert rank(M, range(3)) == 2

    @given(small_cap_matroids(), st.data())
    def test_independence_matches_hall(self, M, data):
        X = data.draw(st.sets(st.integers(0, M.ground_size - 1)))
        assert M.is_independent(X) == hall_independent(M.hypergraph, M.b, X)

    @given(small_cap_matroids(), st.data())
    def test_fast_queries_match_definition(self, M, data):
        I = frozenset(data.draw(st.sets(st.integers(0, M.ground_size - 1))))
        if not M.is_independent(I):
            return
        for y in range(M.ground_size):
            if y in I:
                continue
            assert M.can_add(I, y) == M.is_independent(I | {y})
            if not M.can_add(I, y):
                expect = [z for z in sorted(I) if M.is_independent((I - {z}) | {y})]
                assert M.swappable(I, y) == expect

    @given(small_cap_matroids())
    def test_axioms(self, M):
        assert axiom_check(M)


class TestRankAndIndex:
    def test_rank_examples(self):
        assert rank(GraphicMatroid(TRIANGLE), []) == 0
        assert rank(GraphicMatroid(TRIANGLE), range(3)) == 2

    def test_k_index_examples(self):
        assert k_index(GraphicMatroid(TRIANGLE)) == 2
        assert k_index(FunctionOracle(5, lambda X: True)) == 1
        assert k_index(GraphicMatroid(K(5))) == 3

    def test_axiom_examples(self):
        assert axiom_check(GraphicMatroid(K(4)))
        broken = FunctionOracle(4, lambda X: len(X) <= 2 or len(X) == 4)
        assert not axiom_check(broken)

    @given(small_cap_matroids())
    def test_rank_monotone_submodular(self, M):
        n = M.ground_size
        sets = [frozenset(s) for k in range(n + 1) for s in itertools.combinations(range(n), k)]
        rk = {S: rank(M, S) for S in sets}
        for A in sets[:: max(1, len(sets) // 40)]:
            for B in sets[:: max(1, len(sets) // 40)]:
                assert rk[A | B] + rk[A & B] <= rk[A] + rk[B]
                if A <= B:
                    assert rk[A] <= rk[B]


class TestPartition:
    def test_k4_two_forests(self):
        res = edmonds_partition(GraphicMatroid(K(4)), 2)
        assert res is not None and sorted(len(p) for p in res.parts) == [3, 3]

    def test_k5(self):
        assert edmonds_partition(GraphicMatroid(K(5)), 2) is None
        res = edmonds_partition(GraphicMatroid(K(5)), 3)
        assert res is not None and sum(len(p) for p in res.parts) == 10

    def test_singletons(self):
        M = GraphicMatroid(K(4))
        res = edmonds_partition(M, M.ground_size)
        assert res is not None

    def test_loop_is_infeasible(self):
        assert edmonds_partition(FunctionOracle(2, lambda X: 1 not in X), 5) is None

    @given(small_cap_matroids())
    def test_feasible_iff_k_index(self, M):
        k0 = k_index(M)
        for k in range(1, 5):
            res = edmonds_partition(M, k)
            assert (res is not None) == (k >= k0)
            if res is not None:
                assert sorted(itertools.chain(*res.parts)) == list(range(M.ground_size))

    @given(st.integers(0, 10**6), st.sampled_from([(3, 2, 3), (3, 3, 3), (4, 2, 4), (2, 3, 2)]))
    def test_density_implies_partition(self, seed, params):
        # Claim: m(H) <= a/b gives a partition into a parts; the flow oracle agrees.
        r, a, b = params
        H = random_hypergraph(12, r, 2, seed)
        feasible = edmonds_partition(CapTransversalMatroid(H, b), a) is not None
        assert feasible == partition_feasible_by_flow(H, a, b)
        if max_density(H) * b <= a:
            assert feasible
