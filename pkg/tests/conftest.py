import numpy as np
import pytest

from switchsynth import scenarios
from switchsynth.cli import digraph_from_input
from switchsynth.digraph import SwitchingDigraph


def family(doc):
    return {s["index"]: np.array(s["A"], dtype=float) for s in doc["subsystems"]}


@pytest.fixture
def ex1_graph():
    return digraph_from_input(scenarios.example1())


@pytest.fixture
def ex1_family():
    return family(scenarios.example1())


@pytest.fixture
def effect_b_graph():
    return digraph_from_input(scenarios.effect_b())


@pytest.fixture
def effect_a_graph():
    return digraph_from_input(scenarios.effect_a())


def random_digraph(rng, max_vertices=8, max_edges=16, loops=True):
    """Random weighted digraph: edges U[-2, 2], vertex weights (0, 2], random partition."""
    n = int(rng.integers(1, max_vertices + 1))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if loops or i != j]
    m = int(rng.integers(0, min(max_edges, len(pairs)) + 1))
    chosen = [pairs[k] for k in sorted(rng.choice(len(pairs), size=m, replace=False))]
    stable = frozenset(int(v) for v in range(1, n + 1) if rng.random() < 0.5)
    return SwitchingDigraph(
        vertices=tuple(range(1, n + 1)),
        stable=stable,
        vertex_weight={v: float(2.0 - 2.0 * rng.random()) for v in range(1, n + 1)},
        edge_weight={e: float(rng.uniform(-2, 2)) for e in chosen},
    )


def graph_from_costs(costs, n=None):
    """All vertices unstable with zero weight, so edge cost equals edge weight."""
    vs = sorted({v for e in costs for v in e} | set(range(1, (n or 0) + 1)))
    return SwitchingDigraph(
        vertices=tuple(vs),
        stable=frozenset(),
        vertex_weight={v: 0.0 for v in vs},
        edge_weight=dict(costs),
    )


def random_closed_walk(rng, max_len=30, max_vertices=6, p_stable=0.5):
    """A random closed walk plus a digraph whose edges are exactly the walk's edges."""
    n = int(rng.integers(1, max_vertices + 1))
    length = int(rng.integers(1, max_len + 1))
    body = [int(v) for v in rng.integers(1, n + 1, size=length)]
    vs = body + [body[0]]
    edges = {(vs[k - 1], vs[k]) for k in range(1, len(vs))}
    used = sorted(set(vs))
    G = SwitchingDigraph(
        vertices=tuple(used),
        stable=frozenset(v for v in used if rng.random() < p_stable),
        vertex_weight={v: float(2.0 - 2.0 * rng.random()) for v in used},
        edge_weight={e: float(rng.uniform(-2, 2)) for e in sorted(edges)},
    )
    from switchsynth.walks import Walk

    return Walk(vs), G
