"""Minimum-cost contractive circuits via a circulation LP and Hierholzer.

The LP is

    minimize    c^T eta
    subject to  A eta = 0,  0 <= eta <= 1,  sum(eta) >= 1,
                eta(j -> j') = eta(j' -> j)   for every split self-loop,

with ``A`` the incidence matrix from :func:`digraph.incidence_matrix`.
Whenever the optimum is negative it is attained at an integral vertex,
and its support is a union of edge-disjoint circuits; each weakly
connected piece is Eulerian and Hierholzer's algorithm turns it into a
single circuit.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .digraph import Edge, IncidenceMatrix, SwitchingDigraph, incidence_matrix
from .errors import EmptySupport, Infeasible, SolverFailure, Unbalanced
from .walks import Walk, xi_bar

EPS = 1e-9
ROUND_TOL = 1e-6


class Status(str, enum.Enum):
    CONTRACTIVE = "Contractive"
    NONE_EXISTS = "NoneExists"


@dataclass
class CircuitSolution:
    status: Status
    objective: float
    eta: np.ndarray | None
    incidence: IncidenceMatrix
    support: list[Edge] = field(default_factory=list)
    components: list[Walk] = field(default_factory=list)
    circuit: Walk | None = None

    @property
    def multi_component(self) -> bool:
        return len(self.components) > 1


def solve_lp(G: SwitchingDigraph) -> CircuitSolution:
    """Solve the circulation LP; ``circuit`` is left unset."""
    if not G.edges:
        raise Infeasible("graph has no edges")
    inc = incidence_matrix(G)
    n = inc.matrix.shape[1]
    A_eq = inc.matrix.astype(float)
    b_eq = np.zeros(A_eq.shape[0])
    if inc.loop_pairs:
        pair_rows = np.zeros((len(inc.loop_pairs), n))
        for r, (c_out, c_back) in enumerate(inc.loop_pairs):
            pair_rows[r, c_out] = 1.0
            pair_rows[r, c_back] = -1.0
        A_eq = np.vstack([A_eq, pair_rows])
        b_eq = np.concatenate([b_eq, np.zeros(len(inc.loop_pairs))])
    # dual simplex returns a basic (vertex) solution
    res = linprog(
        inc.costs,
        A_ub=-np.ones((1, n)),
        b_ub=[-1.0],
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(0.0, 1.0)] * n,
        method="highs-ds",
    )
    if res.status == 2:
        raise Infeasible("no circulation with sum(eta) >= 1: the graph has no closed walk")
    if res.status != 0:
        raise SolverFailure(f"LP solver failed: {res.message}")
    objective = float(res.fun)
    if not objective < -EPS:
        return CircuitSolution(Status.NONE_EXISTS, objective, None, inc)

    x = np.asarray(res.x)
    eta = np.rint(x)
    if np.max(np.abs(x - eta)) > ROUND_TOL:
        raise SolverFailure("LP returned a non-integral optimum")
    eta = eta.astype(int)
    if np.any(inc.matrix @ eta != 0):
        raise SolverFailure("rounded LP solution is not a circulation")
    support = []
    for c, e in enumerate(inc.column_edge):
        if eta[c] and e not in support:
            support.append(e)
    objective = float(inc.costs @ eta)
    return CircuitSolution(Status.CONTRACTIVE, objective, eta, inc, support=support)


def _components(edges: list[Edge]) -> list[list[Edge]]:
    parent: dict[int, int] = {}

    def find(v):
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in edges:
        parent[find(i)] = find(j)
    groups: dict[int, list[Edge]] = defaultdict(list)
    for e in edges:
        groups[find(e[0])].append(e)
    return sorted(groups.values(), key=lambda es: min(min(e) for e in es))


def hierholzer(edges: list[Edge], start: int | None = None) -> Walk:
    """Eulerian circuit through every edge of a balanced, connected edge set."""
    if not edges:
        raise EmptySupport("no edges")
    out_deg: dict[int, int] = defaultdict(int)
    in_deg: dict[int, int] = defaultdict(int)
    adj: dict[int, list[int]] = defaultdict(list)
    for i, j in edges:
        out_deg[i] += 1
        in_deg[j] += 1
        adj[i].append(j)
    for v in set(out_deg) | set(in_deg):
        if out_deg[v] != in_deg[v]:
            raise Unbalanced(f"vertex {v} has in-degree {in_deg[v]} and out-degree {out_deg[v]}")
    if len(_components(edges)) != 1:
        raise Unbalanced("edge set is not connected")
    # pop from the end, so store successors in descending order
    for v in adj:
        adj[v].sort(reverse=True)
    if start is None:
        start = min(adj)
    stack = [start]
    circuit: list[int] = []
    while stack:
        v = stack[-1]
        if adj[v]:
            stack.append(adj[v].pop())
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    return Walk(circuit)


def extract_circuits(G: SwitchingDigraph, support: list[Edge]) -> list[Walk]:
    """One Eulerian circuit per connected component of the support."""
    return [hierholzer(comp) for comp in _components(support)]


def synthesize_circuit(G: SwitchingDigraph) -> CircuitSolution:
    """LP followed by Hierholzer; ``circuit`` is the most negative component."""
    sol = solve_lp(G)
    if sol.status is not Status.CONTRACTIVE:
        return sol
    sol.components = extract_circuits(G, sol.support)
    sol.circuit = min(sol.components, key=lambda W: xi_bar(W, G))
    return sol
