"""Walks on a switching digraph and their contractivity statistics.

A walk is stored as its vertex sequence ``x_0, ..., x_l``; the edges
``(x_{i-1}, x_i)`` are implied. Vertex visit counts follow one rule
everywhere: every position except the last one counts, so on a closed
walk the count of ``j`` equals the number of traversed edges leaving
``j``. With that rule ``xi(W) < 1`` and ``xi_bar(W) < 0`` agree on
closed walks.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

from .digraph import Edge, SwitchingDigraph
from .errors import EmptyWalk, EndpointMismatch, InadmissibleWalk, NotCircuit, NotClosed, NotContractive


@dataclass(frozen=True)
class Walk:
    vertices: tuple[int, ...]

    def __init__(self, vertices: Sequence[int]):
        vs = tuple(int(v) for v in vertices)
        if not vs:
            raise EmptyWalk("a walk needs at least one vertex")
        object.__setattr__(self, "vertices", vs)

    def __repr__(self) -> str:
        return "Walk(" + "->".join(map(str, self.vertices)) + ")"

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def initial(self) -> int:
        return self.vertices[0]

    @property
    def final(self) -> int:
        return self.vertices[-1]

    @property
    def edges(self) -> list[Edge]:
        vs = self.vertices
        return [(vs[i - 1], vs[i]) for i in range(1, len(vs))]

    def edge_counts(self) -> Counter:
        return Counter(self.edges)

    def vertex_counts(self) -> Counter:
        return Counter(self.vertices[:-1])

    def is_closed(self) -> bool:
        return self.length > 0 and self.vertices[0] == self.vertices[-1]

    def is_circuit(self) -> bool:
        return self.is_closed() and len(set(self.edges)) == self.length

    def is_cycle(self) -> bool:
        if not self.is_closed():
            return False
        interior = self.vertices[1:-1]
        return len(set(interior)) == len(interior) and self.vertices[0] not in interior

    def check(self, G: SwitchingDigraph) -> "Walk":
        """Raise :class:`InadmissibleWalk` unless every implied edge is in ``G``."""
        if self.vertices[0] not in G.vertex_weight:
            raise InadmissibleWalk(f"unknown vertex {self.vertices[0]}")
        for e in self.edges:
            if not G.has_edge(*e):
                raise InadmissibleWalk(f"edge {e} is not admissible")
        return self

    def canonical(self) -> "Walk":
        """Rotate a cycle so it starts at its smallest vertex."""
        if not self.is_cycle():
            return self
        body = self.vertices[:-1]
        k = body.index(min(body))
        body = body[k:] + body[:k]
        return Walk(body + (body[0],))

    def to_list(self) -> list[int]:
        return list(self.vertices)

    def signal_at(self, t: int) -> int:
        """Vertex active at time ``t`` when the closed walk is repeated forever."""
        return self.vertices[t % self.length]


def nu(W: Walk) -> float:
    """Distinct vertices over length."""
    if W.length == 0:
        raise EmptyWalk("transition frequency needs at least one edge")
    return len(set(W.vertices)) / W.length


def _xi_parts(W: Walk, G: SwitchingDigraph) -> tuple[float, float]:
    num = 0.0
    for e in W.edges:
        num += G.edge_weight[e]
    den = 0.0
    for j, n in W.vertex_counts().items():
        if j in G.stable:
            den += G.vertex_weight[j] * n
        else:
            num += G.vertex_weight[j] * n
    return num, den


def xi(W: Walk, G: SwitchingDigraph) -> float | None:
    """Ratio of transition plus unstable-dwell weight to stable-dwell weight.

    Returns ``None`` (undefined) when the walk never dwells on a stable
    vertex with positive weight.
    """
    if W.length == 0:
        raise EmptyWalk("xi needs at least one edge")
    W.check(G)
    num, den = _xi_parts(W, G)
    if den == 0:
        return None
    return num / den


def xi_bar(W: Walk, G: SwitchingDigraph) -> float:
    """Sum of effective edge costs along a closed walk, in traversal order."""
    if not W.is_closed():
        raise NotClosed(f"{W} is not closed")
    total = 0.0
    try:
        for e in W.edges:
            total += G.cost(*e)
    except KeyError as exc:
        raise InadmissibleWalk(str(exc)) from None
    return total


def concat(W1: Walk, W2: Walk) -> Walk:
    if W1.final != W2.initial:
        raise EndpointMismatch(f"{W1} ends at {W1.final}, {W2} starts at {W2.initial}")
    return Walk(W1.vertices + W2.vertices[1:])


def repeat(W: Walk, k: int) -> Walk:
    if not W.is_closed():
        raise NotClosed(f"{W} is not closed")
    vs = W.vertices[:1] + W.vertices[1:] * k
    return Walk(vs)


def _split_repeated_edge(vs: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    # first edge whose first occurrence comes earliest among repeated edges
    first: dict[Edge, int] = {}
    last: dict[Edge, int] = {}
    for pos in range(1, len(vs)):
        e = (vs[pos - 1], vs[pos])
        first.setdefault(e, pos)
        last[e] = pos
    repeated = [e for e in first if last[e] != first[e]]
    if not repeated:
        return None
    e = min(repeated, key=first.__getitem__)
    a, b = first[e], last[e]
    outer = vs[: a + 1] + vs[b + 1 :]
    inner = vs[a : b + 1]
    return outer, inner


def decompose_to_circuits(W: Walk) -> list[Walk]:
    """Partition the edge multiset of a closed walk into circuits.

    A repeated edge ``e`` is cut out between its first and last
    occurrence: the outer part keeps the first copy, the inner closed walk
    keeps the last one. Both parts are decomposed again until no edge
    repeats.
    """
    if not W.is_closed():
        raise NotClosed(f"{W} is not closed")
    out: list[Walk] = []
    stack = [W.vertices]
    while stack:
        vs = stack.pop()
        split = _split_repeated_edge(vs)
        if split is None:
            out.append(Walk(vs))
        else:
            outer, inner = split
            stack.append(outer)
            stack.append(inner)
    return out


def _split_at_base(vs: tuple[int, ...]) -> list[tuple[int, ...]]:
    base = vs[0]
    cuts = [0] + [p for p in range(1, len(vs) - 1) if vs[p] == base] + [len(vs) - 1]
    return [vs[cuts[k] : cuts[k + 1] + 1] for k in range(len(cuts) - 1)]


def _split_repeated_vertex(vs: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for pos in range(1, len(vs) - 1):
        first.setdefault(vs[pos], pos)
        last[vs[pos]] = pos
    repeated = [v for v in first if last[v] != first[v]]
    if not repeated:
        return None
    v = min(repeated, key=first.__getitem__)
    a, b = first[v], last[v]
    return vs[: a + 1] + vs[b + 1 :], vs[a : b + 1]


def _closed_to_cycles(vs: tuple[int, ...]) -> list[Walk]:
    out: list[Walk] = []
    stack = [vs]
    while stack:
        part = stack.pop()
        # a piece cut out of a larger walk can return to its own base again
        pieces = _split_at_base(part)
        if len(pieces) > 1:
            stack.extend(reversed(pieces))
            continue
        split = _split_repeated_vertex(part)
        if split is None:
            out.append(Walk(part))
        else:
            outer, inner = split
            stack.append(outer)
            stack.append(inner)
    return out


def decompose_to_cycles(W: Walk) -> list[Walk]:
    """Partition a circuit into cycles.

    Cut at every interior return to the base vertex, then cut each piece
    between the first and last occurrence of its earliest repeated
    interior vertex; repeat on every piece until all are cycles.
    """
    if not W.is_circuit():
        raise NotCircuit(f"{W} is not a circuit")
    return _closed_to_cycles(W.vertices)


def extract_contractive_cycle(W: Walk, G: SwitchingDigraph) -> Walk:
    """Most negative cycle in the cycle decomposition of a contractive closed walk."""
    total = xi_bar(W, G)
    if not total < 0:
        raise NotContractive(f"xi_bar={total} is not negative")
    best: Walk | None = None
    best_cost = 0.0
    for circuit in decompose_to_circuits(W):
        for cyc in _closed_to_cycles(circuit.vertices):
            c = xi_bar(cyc, G)
            if best is None or c < best_cost:
                best, best_cost = cyc, c
    assert best is not None and best_cost < 0
    return best


@dataclass(frozen=True)
class PrefixStat:
    length: int
    nu: float
    xi: float | None


def prefix_stats(W: Walk, G: SwitchingDigraph, stride: int = 1) -> Iterator[PrefixStat]:
    """``(|W'|, nu(W'), xi(W'))`` for prefixes of length stride, 2*stride, ... and |W|."""
    if W.length == 0:
        raise EmptyWalk("prefix statistics need at least one edge")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    W.check(G)
    vs = W.vertices
    num = den = 0.0
    seen = {vs[0]}
    for pos in range(1, len(vs)):
        src = vs[pos - 1]
        num += G.edge_weight[(src, vs[pos])]
        if src in G.stable:
            den += G.vertex_weight[src]
        else:
            num += G.vertex_weight[src]
        seen.add(vs[pos])
        if pos % stride == 0 or pos == len(vs) - 1:
            yield PrefixStat(pos, len(seen) / pos, (num / den) if den != 0 else None)


def prefix_stats_csv(stats: Iterator[PrefixStat]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["length", "nu", "xi"])
    for s in stats:
        writer.writerow([s.length, repr(s.nu), "" if s.xi is None else repr(s.xi)])
    return buf.getvalue()
