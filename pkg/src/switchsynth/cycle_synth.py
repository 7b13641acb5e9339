"""Contractive cycles as negative cycles under the effective edge cost."""

from __future__ import annotations

from .circuit_synth import Status, solve_lp
from .digraph import SwitchingDigraph
from .errors import GraphTooLarge
from .walks import Walk, xi_bar

DEFAULT_MAX_VERTICES = 12


def _relax_tol(G: SwitchingDigraph) -> float:
    scale = max([1.0] + [abs(G.cost(*e)) for e in G.edges])
    return 1e-12 * scale * max(1, len(G.vertices))


def detect_negative_cycle(G: SwitchingDigraph) -> Walk | None:
    """A simple cycle with negative ``xi_bar``, or ``None`` if there is none.

    Negative self-loops are returned directly (the most negative one).
    Otherwise Bellman-Ford-Moore runs from a virtual source joined to every
    vertex at zero cost; an edge still relaxable after ``|V|`` rounds lies
    downstream of a negative cycle, which is recovered by stepping back
    ``|V|`` predecessors and then tracing the loop.
    """
    loops = [(G.cost(j, j), j) for j in G.self_loops if G.cost(j, j) < 0]
    if loops:
        _, j = min(loops)
        return Walk([j, j])

    vertices = G.vertices
    dist = {v: 0.0 for v in vertices}
    pred: dict[int, int | None] = {v: None for v in vertices}
    edges = [(i, j, G.cost(i, j)) for (i, j) in G.edges]
    tol = _relax_tol(G)
    last = None
    for _ in range(len(vertices)):
        last = None
        for i, j, c in edges:
            if dist[i] + c < dist[j] - tol:
                dist[j] = dist[i] + c
                pred[j] = i
                last = j
        if last is None:
            return None

    v = last
    for _ in range(len(vertices)):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.append(v)
    cycle.reverse()
    W = Walk(cycle).canonical()
    return W if xi_bar(W, G) < 0 else None


def enumerate_cycles(
    G: SwitchingDigraph,
    max_len: int | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> list[tuple[Walk, float]]:
    """Every elementary cycle (up to ``max_len`` edges) with its cost, ascending.

    Each cycle is produced once, rooted at its smallest vertex in the
    digraph's vertex order. Ties in cost are broken by the vertex sequence.
    Exponential; guarded by ``max_vertices``.
    """
    n = len(G.vertices)
    if n > max_vertices:
        raise GraphTooLarge(f"{n} vertices exceeds the enumeration cap of {max_vertices}")
    limit = n if max_len is None else max_len
    order = {v: k for k, v in enumerate(G.vertices)}
    found: list[tuple[Walk, float]] = []
    for root in G.vertices:
        r = order[root]
        path = [root]
        on_path = {root}
        # iterative DFS over vertices ranked above the root
        iters = [iter(G.successors(root))]
        while iters:
            try:
                nxt = next(iters[-1])
            except StopIteration:
                iters.pop()
                on_path.discard(path.pop())
                continue
            if nxt == root:
                if len(path) <= limit:
                    W = Walk(path + [root])
                    found.append((W, xi_bar(W, G)))
                continue
            if order[nxt] > r and nxt not in on_path and len(path) < limit:
                path.append(nxt)
                on_path.add(nxt)
                iters.append(iter(G.successors(nxt)))
    found.sort(key=lambda wc: (wc[1], wc[0].vertices))
    return found


def most_negative_cycle(G: SwitchingDigraph, **kwargs) -> tuple[Walk, float] | None:
    cycles = enumerate_cycles(G, **kwargs)
    if cycles and cycles[0][1] < 0:
        return cycles[0]
    return None


def most_negative_cycle_via_lp_support(G: SwitchingDigraph, **kwargs) -> tuple[Walk, float] | None:
    """Enumerate cycles only inside the support of the circulation LP optimum."""
    sol = solve_lp(G)
    if sol.status is not Status.CONTRACTIVE:
        return None
    return most_negative_cycle(G.subgraph(sol.support), **kwargs)
