"""Weighted switching digraph.

Vertices are subsystem indices, split into stable and unstable sets.
Vertex ``j`` carries ``w(j) = |ln lam_j|`` and edge ``(i, j)`` carries
``w(i, j) = ln mu_ij``. The effective cost of traversing an edge out of
``k`` is ``w(k, l) + w(k)`` for unstable ``k`` and ``w(k, l) - w(k)`` for
stable ``k``; summing it along a closed walk gives the contractivity
statistic used by every synthesis method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .certificates import (
    DEFAULT_MARGIN,
    LyapunovCertificate,
    compute_certificate,
    compute_mu,
)
from .errors import InputError, MissingCertificate, NoSuchEdge, UnknownVertexInEdge

Edge = tuple[int, int]


@dataclass(frozen=True)
class SwitchingDigraph:
    vertices: tuple[int, ...]
    stable: frozenset[int]
    vertex_weight: Mapping[int, float]
    edge_weight: Mapping[Edge, float]
    certificates: Mapping[int, LyapunovCertificate] | None = None
    _succ: dict[int, tuple[int, ...]] = field(init=False, repr=False, compare=False)
    _cost: dict[Edge, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vs = tuple(self.vertices)
        if len(set(vs)) != len(vs):
            raise InputError("duplicate vertex labels")
        vset = set(vs)
        if not set(self.stable) <= vset:
            raise InputError("stable set contains unknown vertices")
        for j in vs:
            if j not in self.vertex_weight:
                raise MissingCertificate(f"no vertex weight for vertex {j}")
            w = self.vertex_weight[j]
            if not (math.isfinite(w) and w >= 0):
                raise InputError(f"vertex weight of {j} must be finite and >= 0, got {w}")
        succ: dict[int, list[int]] = {j: [] for j in vs}
        cost: dict[Edge, float] = {}
        for (i, j), w in self.edge_weight.items():
            if i not in vset or j not in vset:
                raise UnknownVertexInEdge(f"edge {(i, j)} references an unknown vertex")
            if not math.isfinite(w):
                raise InputError(f"edge weight of {(i, j)} is not finite")
            succ[i].append(j)
            sign = -1.0 if i in self.stable else 1.0
            cost[(i, j)] = w + sign * self.vertex_weight[i]
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "stable", frozenset(self.stable))
        object.__setattr__(self, "vertex_weight", dict(self.vertex_weight))
        object.__setattr__(self, "edge_weight", dict(self.edge_weight))
        object.__setattr__(self, "_succ", {j: tuple(s) for j, s in succ.items()})
        object.__setattr__(self, "_cost", cost)

    @property
    def unstable(self) -> frozenset[int]:
        return frozenset(self.vertices) - self.stable

    @property
    def edges(self) -> list[Edge]:
        return list(self.edge_weight)

    @property
    def self_loops(self) -> list[int]:
        return [i for (i, j) in self.edge_weight if i == j]

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edge_weight

    def successors(self, v: int) -> tuple[int, ...]:
        return self._succ[v]

    def cost(self, k: int, l: int) -> float:
        try:
            return self._cost[(k, l)]
        except KeyError:
            raise NoSuchEdge(f"no edge {(k, l)}") from None

    def subgraph(self, edges: Iterable[Edge]) -> "SwitchingDigraph":
        """Same vertices and weights, restricted edge set."""
        keep = [tuple(e) for e in edges]
        for e in keep:
            if e not in self.edge_weight:
                raise NoSuchEdge(f"no edge {e}")
        return SwitchingDigraph(
            vertices=self.vertices,
            stable=self.stable,
            vertex_weight=self.vertex_weight,
            edge_weight={e: self.edge_weight[e] for e in keep},
            certificates=self.certificates,
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "vertices": list(self.vertices),
            "stable": sorted(self.stable),
            "unstable": sorted(self.unstable),
            "vertex_weights": {str(j): self.vertex_weight[j] for j in self.vertices},
            "edges": [{"from": i, "to": j, "weight": w} for (i, j), w in self.edge_weight.items()],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SwitchingDigraph":
        vertices = [int(v) for v in data["vertices"]]
        stable = {int(v) for v in data["stable"]}
        unstable = {int(v) for v in data["unstable"]}
        if stable & unstable or (stable | unstable) != set(vertices):
            raise InputError("stable/unstable must partition the vertex set")
        vw = {int(k): float(v) for k, v in data["vertex_weights"].items()}
        ew = {(int(e["from"]), int(e["to"])): float(e["weight"]) for e in data["edges"]}
        if len(ew) != len(data["edges"]):
            raise InputError("duplicate edges")
        return cls(vertices=tuple(vertices), stable=frozenset(stable), vertex_weight=vw, edge_weight=ew)


SCHEMA_VERSION = 1


def _check_edges(vertices: Sequence[int], edges: Iterable[Sequence[int]]) -> list[Edge]:
    vset = set(vertices)
    out: list[Edge] = []
    seen: set[Edge] = set()
    for e in edges:
        i, j = (int(e[0]), int(e[1]))
        if i not in vset or j not in vset:
            raise UnknownVertexInEdge(f"edge {(i, j)} references an unknown vertex")
        if (i, j) in seen:
            raise InputError(f"duplicate edge {(i, j)}")
        seen.add((i, j))
        out.append((i, j))
    return out


def build(
    subsystems: Mapping[int, np.ndarray],
    edges: Iterable[Sequence[int]],
    certificates: Mapping[int, LyapunovCertificate] | None = None,
    margin: float = DEFAULT_MARGIN,
) -> SwitchingDigraph:
    """Digraph from subsystem matrices, computing missing certificates.

    If ``certificates`` is given it must cover every vertex.
    """
    vertices = tuple(subsystems)
    edge_list = _check_edges(vertices, edges)
    if certificates is None:
        certs = {j: compute_certificate(subsystems[j], margin=margin) for j in vertices}
    else:
        missing = [j for j in vertices if j not in certificates]
        if missing:
            raise MissingCertificate(f"no certificate for vertices {missing}")
        certs = dict(certificates)
    ew: dict[Edge, float] = {}
    for i, j in edge_list:
        # own certificate on both sides of a self-loop: mu_jj = 1 exactly
        mu = 1.0 if i == j else compute_mu(certs[i].P, certs[j].P)
        ew[(i, j)] = math.log(mu)
    return SwitchingDigraph(
        vertices=vertices,
        stable=frozenset(j for j in vertices if certs[j].is_stable),
        vertex_weight={j: abs(math.log(certs[j].lam)) for j in vertices},
        edge_weight=ew,
        certificates=certs,
    )


def from_constants(
    lambdas: Mapping[int, float],
    mus: Mapping[Edge, float],
    edges: Iterable[Sequence[int]] | None = None,
) -> SwitchingDigraph:
    """Digraph from externally supplied ``lam_j`` and ``mu_ij``.

    A vertex is stable iff ``lam_j < 1``. ``edges`` defaults to the keys of
    ``mus``; a self-loop without a supplied ``mu`` gets ``mu_jj = 1``.
    """
    vertices = tuple(lambdas)
    for j, lam in lambdas.items():
        if not lam > 0 or lam == 1:
            raise InputError(f"lambda_{j}={lam} must be positive and different from 1")
    edge_list = _check_edges(vertices, mus if edges is None else edges)
    ew: dict[Edge, float] = {}
    for i, j in edge_list:
        if (i, j) in mus:
            mu = float(mus[(i, j)])
        elif i == j:
            mu = 1.0
        else:
            raise MissingCertificate(f"no mu for edge {(i, j)}")
        if not mu > 0:
            raise InputError(f"mu_{i}{j}={mu} must be positive")
        ew[(i, j)] = math.log(mu)
    return SwitchingDigraph(
        vertices=vertices,
        stable=frozenset(j for j in vertices if lambdas[j] < 1),
        vertex_weight={j: abs(math.log(lambdas[j])) for j in vertices},
        edge_weight=ew,
    )


def build_with_constants(
    subsystems: Mapping[int, np.ndarray],
    edges: Iterable[Sequence[int]],
    lambdas: Mapping[int, float] | None = None,
    mus: Mapping[Edge, float] | None = None,
    margin: float = DEFAULT_MARGIN,
) -> SwitchingDigraph:
    """Supplied ``lam``/``mu`` values where given, computed certificates elsewhere.

    A ``mu`` may only be computed when neither endpoint has a supplied
    ``lam``, since the supplied constants come without their ``P``.
    """
    lambdas = dict(lambdas or {})
    mus = dict(mus or {})
    if not lambdas and not mus:
        return build(subsystems, edges, margin=margin)
    vertices = tuple(subsystems)
    unknown = [j for j in lambdas if j not in subsystems]
    if unknown:
        raise UnknownVertexInEdge(f"lambda given for unknown vertices {unknown}")
    edge_list = _check_edges(vertices, edges)
    for e in mus:
        if e not in edge_list:
            raise UnknownVertexInEdge(f"mu given for non-edge {e}")
    certs = {j: compute_certificate(subsystems[j], margin=margin) for j in vertices if j not in lambdas}
    lam = {j: float(lambdas[j]) if j in lambdas else certs[j].lam for j in vertices}
    full_mus: dict[Edge, float] = {}
    for i, j in edge_list:
        if (i, j) in mus:
            full_mus[(i, j)] = float(mus[(i, j)])
        elif i == j:
            full_mus[(i, j)] = 1.0
        elif i in certs and j in certs:
            full_mus[(i, j)] = compute_mu(certs[i].P, certs[j].P)
        else:
            raise MissingCertificate(f"no mu for edge {(i, j)} and no matrix certificate to compute it")
    return from_constants(lam, full_mus, edge_list)


def edge_cost(G: SwitchingDigraph, edge: Edge) -> float:
    return G.cost(*edge)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Node-arc incidence matrix with self-loops split through auxiliary vertices.

    A self-loop ``(j, j)`` becomes the column pair ``j -> j'`` and
    ``j' -> j``; the full loop cost sits on the first, 0 on the second.
    ``column_edge[c]`` is the original edge behind column ``c``.
    """

    matrix: np.ndarray
    rows: tuple
    columns: tuple[tuple, ...]
    column_edge: tuple[Edge, ...]
    costs: np.ndarray
    loop_pairs: tuple[tuple[int, int], ...]

    def columns_of(self, edge: Edge) -> list[int]:
        return [c for c, e in enumerate(self.column_edge) if e == edge]


def incidence_matrix(G: SwitchingDigraph) -> IncidenceMatrix:
    loops = G.self_loops
    rows: list = list(G.vertices) + [("aux", j) for j in loops]
    index = {r: k for k, r in enumerate(rows)}
    columns: list[tuple] = []
    column_edge: list[Edge] = []
    costs: list[float] = []
    loop_pairs: list[tuple[int, int]] = []
    for (i, j) in G.edges:
        c = G.cost(i, j)
        if i == j:
            aux = ("aux", j)
            loop_pairs.append((len(columns), len(columns) + 1))
            columns += [(j, aux), (aux, j)]
            column_edge += [(i, j), (i, j)]
            costs += [c, 0.0]
        else:
            columns.append((i, j))
            column_edge.append((i, j))
            costs.append(c)
    M = np.zeros((len(rows), len(columns)), dtype=int)
    for c, (tail, head) in enumerate(columns):
        M[index[tail], c] = 1
        M[index[head], c] = -1
    return IncidenceMatrix(
        matrix=M,
        rows=tuple(rows),
        columns=tuple(columns),
        column_edge=tuple(column_edge),
        costs=np.asarray(costs, dtype=float),
        loop_pairs=tuple(loop_pairs),
    )
