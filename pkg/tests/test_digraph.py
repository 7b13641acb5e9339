import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_digraph
from switchsynth.certificates import compute_certificate
from switchsynth.digraph import (
    SwitchingDigraph,
    build,
    build_with_constants,
    edge_cost,
    from_constants,
    incidence_matrix,
)
from switchsynth.errors import InputError, MissingCertificate, NoSuchEdge, UnknownVertexInEdge
from switchsynth.walks import Walk, xi_bar


def test_example1_weights(ex1_graph):
    G = ex1_graph
    assert G.stable == {1, 2} and G.unstable == {3, 4}
    assert G.vertex_weight[1] == pytest.approx(0.4339, abs=5e-5)
    assert G.edge_weight[(3, 3)] == 0.0
    assert len(G.edges) == 14


def test_single_stable_self_loop():
    G = build({1: 0.5 * np.eye(2)}, [(1, 1)])
    assert G.edge_weight[(1, 1)] == 0.0
    assert G.vertex_weight[1] > 0
    assert G.cost(1, 1) == -G.vertex_weight[1] < 0


def test_effect_b_weights(effect_b_graph):
    G = effect_b_graph
    assert G.edge_weight[(1, 2)] == pytest.approx(-0.1190, abs=5e-5)
    assert G.edge_weight[(2, 1)] == pytest.approx(0.5645, abs=5e-5)
    assert G.vertex_weight[1] == pytest.approx(0.8407, abs=5e-5)
    assert G.vertex_weight[2] == pytest.approx(1.3933, abs=5e-5)
    assert edge_cost(G, (1, 2)) == pytest.approx(-0.9597, abs=1e-4)
    assert edge_cost(G, (2, 1)) == pytest.approx(1.9578, abs=1e-4)


def test_no_such_edge(effect_b_graph):
    with pytest.raises(NoSuchEdge):
        edge_cost(effect_b_graph, (1, 3))


def test_build_errors():
    A = {1: 0.5 * np.eye(2), 2: 2 * np.eye(2)}
    with pytest.raises(UnknownVertexInEdge):
        build(A, [(1, 3)])
    with pytest.raises(MissingCertificate):
        build(A, [(1, 2)], certificates={1: compute_certificate(A[1])})
    with pytest.raises(InputError):
        build(A, [(1, 2), (1, 2)])


def test_build_uses_computed_certificates():
    A = {1: 0.5 * np.eye(2), 2: np.diag([2.0, 0.5])}
    G = build(A, [(1, 2), (2, 1)])
    assert G.stable == {1}
    assert G.vertex_weight[1] == pytest.approx(abs(math.log(0.2525)))
    c1, c2 = G.certificates[1], G.certificates[2]
    assert c1.lam < 1 < c2.lam


def test_from_constants_rejects_lambda_one():
    with pytest.raises(InputError):
        from_constants({1: 1.0}, {})


def test_build_with_constants_needs_matrix_certificates():
    A = {1: 0.5 * np.eye(2), 2: 2 * np.eye(2)}
    with pytest.raises(MissingCertificate):
        build_with_constants(A, [(1, 2)], lambdas={1: 0.3}, mus={})
    G = build_with_constants(A, [(1, 2)], lambdas={1: 0.3}, mus={(1, 2): 1.5})
    assert G.edge_weight[(1, 2)] == pytest.approx(math.log(1.5))
    assert G.vertex_weight[2] == pytest.approx(math.log(4.04))


def test_incidence_two_cycle():
    G = from_constants({1: 0.5, 2: 2.0}, {(1, 2): 1.0, (2, 1): 1.0})
    np.testing.assert_array_equal(incidence_matrix(G).matrix, [[1, -1], [-1, 1]])


def test_incidence_self_loop():
    G = from_constants({1: 0.5}, {(1, 1): 1.0})
    inc = incidence_matrix(G)
    np.testing.assert_array_equal(inc.matrix, [[1, -1], [-1, 1]])
    assert inc.rows == (1, ("aux", 1))
    assert inc.costs[0] == pytest.approx(-math.log(2)) and inc.costs[1] == 0.0


def test_incidence_example1_shape(ex1_graph):
    inc = incidence_matrix(ex1_graph)
    assert inc.matrix.shape == (6, 16)
    assert len(inc.loop_pairs) == 2


def test_dict_round_trip(ex1_graph):
    G = SwitchingDigraph.from_dict(ex1_graph.to_dict())
    assert G == SwitchingDigraph(
        vertices=ex1_graph.vertices,
        stable=ex1_graph.stable,
        vertex_weight=ex1_graph.vertex_weight,
        edge_weight=ex1_graph.edge_weight,
    )


def test_from_dict_rejects_bad_partition(ex1_graph):
    d = ex1_graph.to_dict()
    d["unstable"] = [3]
    with pytest.raises(InputError):
        SwitchingDigraph.from_dict(d)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_incidence_invariants(seed):
    rng = np.random.default_rng(seed)
    G = random_digraph(rng)
    inc = incidence_matrix(G)
    n_loops = len(G.self_loops)
    assert inc.matrix.shape == (len(G.vertices) + n_loops, len(G.edges) + n_loops)
    assert np.all(inc.matrix.sum(axis=0) == 0)
    assert np.all((inc.matrix == 1).sum(axis=0) == 1)
    for e in G.edges:
        cols = inc.columns_of(e)
        assert all(inc.column_edge[c] == e for c in cols)
        assert len(cols) == (2 if e[0] == e[1] else 1)
        assert inc.costs[cols].sum() == pytest.approx(G.cost(*e))
    # stable self-loops with mu_jj = 1 have strictly negative cost
    for j in G.self_loops:
        if j in G.stable and G.edge_weight[(j, j)] == 0 and G.vertex_weight[j] > 0:
            assert G.cost(j, j) < 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_circulation_cost_equals_walk_cost(seed, reps):
    # a closed walk's edge multiplicities form a circulation of equal cost
    rng = np.random.default_rng(seed)
    G = random_digraph(rng)
    v = G.vertices[0]
    if not G.successors(v):
        return
    vs = [v]
    for _ in range(20):
        succ = G.successors(vs[-1])
        if not succ:
            return
        vs.append(int(rng.choice(succ)))
    if v not in vs[1:]:
        return
    vs = vs[: len(vs) - vs[::-1].index(v)]
    W = Walk(vs)
    inc = incidence_matrix(G)
    eta = np.zeros(inc.matrix.shape[1], dtype=int)
    for e, k in W.edge_counts().items():
        for c in inc.columns_of(e):
            eta[c] += k * reps
    assert np.all(inc.matrix @ eta == 0)
    assert inc.costs @ eta == pytest.approx(reps * xi_bar(W, G), abs=1e-12 * W.length * reps * 10)
