"""Randomized cycle construction inside the stable vertex set.

The walk starts at a uniformly chosen stable vertex and keeps stepping to
a uniformly chosen unvisited stable out-neighbour. When none is left it
closes onto the earliest-visited stable out-neighbour, and the loop so
formed is the output cycle. Only adjacency is consulted, never weights.

On graphs where every vertex has at least ``floor(phi(|P_S|))`` stable
out-neighbours, the cycle has at least that many edges; if the weights
are independent with vertex weights in ``(0, B]`` of mean ``beta`` and
edge weights in ``[-A, A]`` of mean at most ``alpha < beta``, the Azuma
bound :func:`azuma_bound` lower-bounds the chance that it is contractive.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from .digraph import SwitchingDigraph
from .errors import (
    CycleLengthUnavailable,
    DeadEnd,
    InfeasibleDegree,
    InvalidModel,
    NotNicelyConnected,
    UnstableVertexInCycle,
)
from .walks import Walk

Sampler = Callable[[np.random.Generator, tuple], np.ndarray]


class Adjacency(Protocol):
    vertices: Sequence[int]
    stable: frozenset

    def successors(self, v: int) -> Sequence[int]: ...


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for stream ``(seed, *stream)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


@dataclass(frozen=True)
class PowerLaw:
    """``phi(r) = coef * r ** power``."""

    coef: float = 0.1
    power: float = 0.5

    def __call__(self, r: int) -> float:
        return self.coef * float(r) ** self.power


@dataclass(frozen=True)
class RandomGraphModel:
    n_stable: int
    n_unstable: int = 0
    phi: Callable[[int], float] = PowerLaw()
    A: float = 2.5
    B: float = 5.0
    alpha: float = 0.0
    beta: float = 2.5
    out_degree: int | None = None
    self_loops: bool = False
    edge_sampler: Sampler | None = field(default=None, compare=False)
    vertex_sampler: Sampler | None = field(default=None, compare=False)

    def validate(self) -> "RandomGraphModel":
        if self.n_stable < 1 or self.n_unstable < 0:
            raise InvalidModel("need at least one stable vertex")
        if not (0 < self.beta < self.B):
            raise InvalidModel(f"need 0 < beta < B, got beta={self.beta}, B={self.B}")
        if not self.A > 0:
            raise InvalidModel("A must be positive")
        if not self.alpha < self.beta:
            raise InvalidModel(f"need alpha < beta, got alpha={self.alpha}, beta={self.beta}")
        if self.alpha < -self.A:
            raise InvalidModel("no law on [-A, A] has mean below -A")
        return self

    @property
    def min_degree(self) -> int:
        return math.floor(self.phi(self.n_stable))

    @property
    def stable_vertices(self) -> list[int]:
        return list(range(1, self.n_stable + 1))

    def sample_edge_weights(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.edge_sampler is not None:
            return np.asarray(self.edge_sampler(rng, size), dtype=float)
        # uniform with mean alpha inside [-A, A]
        m = min(self.alpha, self.A)
        lo, hi = (2 * m - self.A, self.A) if m >= 0 else (-self.A, 2 * m + self.A)
        return rng.uniform(lo, hi, size)

    def sample_vertex_weights(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.vertex_sampler is not None:
            return np.asarray(self.vertex_sampler(rng, size), dtype=float)
        # uniform on (lo, hi] with mean beta inside (0, B]
        lo = max(0.0, 2 * self.beta - self.B)
        hi = 2 * self.beta - lo
        return hi - (hi - lo) * rng.random(size)

    def to_dict(self) -> dict:
        if not isinstance(self.phi, PowerLaw):
            raise InvalidModel("only power-law phi can be serialized")
        return {
            "schema_version": 1,
            "n_stable": self.n_stable,
            "n_unstable": self.n_unstable,
            "phi": {"coef": self.phi.coef, "power": self.phi.power},
            "A": self.A,
            "B": self.B,
            "alpha": self.alpha,
            "beta": self.beta,
            "out_degree": self.out_degree,
            "self_loops": self.self_loops,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomGraphModel":
        phi = d.get("phi", {})
        return cls(
            n_stable=int(d["n_stable"]),
            n_unstable=int(d.get("n_unstable", 0)),
            phi=PowerLaw(float(phi.get("coef", 0.1)), float(phi.get("power", 0.5))),
            A=float(d["A"]),
            B=float(d["B"]),
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            out_degree=d.get("out_degree"),
            self_loops=bool(d.get("self_loops", False)),
        ).validate()


@dataclass(frozen=True)
class GraphSkeleton:
    """Unweighted digraph with a stable/unstable partition."""

    vertices: tuple[int, ...]
    stable: frozenset[int]
    adjacency: dict[int, tuple[int, ...]]

    def successors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.vertices for j in self.adjacency[i]]


def stable_out_degree(G: Adjacency, v: int) -> int:
    return sum(1 for u in G.successors(v) if u in G.stable)


def is_nicely_connected(G: Adjacency, phi: Callable[[int], float]) -> bool:
    need = math.floor(phi(len(G.stable)))
    return all(stable_out_degree(G, v) >= need for v in G.vertices)


def generate_nicely_connected(model: RandomGraphModel, rng_seed: int = 0) -> GraphSkeleton:
    """Random skeleton where every vertex has ``floor(phi(|P_S|))`` stable out-neighbours.

    The degree used is ``model.out_degree`` if set, else
    ``max(floor(phi(|P_S|)), 1)`` so that the randomized walk never stalls.
    Stable out-neighbour sets are uniform subsets; each vertex also gets
    as many unstable out-neighbours, when unstable vertices exist.
    """
    model.validate()
    need = model.min_degree
    d = model.out_degree if model.out_degree is not None else max(need, 1)
    if d < need:
        raise InfeasibleDegree(f"out_degree={d} is below floor(phi)={need}")
    ns, nu_ = model.n_stable, model.n_unstable
    available = ns if model.self_loops else ns - 1
    if d > available:
        raise InfeasibleDegree(f"cannot give {d} distinct stable out-neighbours with |P_S|={ns}")
    rng = make_rng(rng_seed, 0)
    stable = np.arange(1, ns + 1)
    unstable = np.arange(ns + 1, ns + nu_ + 1)
    adjacency: dict[int, tuple[int, ...]] = {}
    for v in range(1, ns + nu_ + 1):
        if v <= ns and not model.self_loops:
            pool = np.delete(stable, v - 1)
        else:
            pool = stable
        picks = sorted(rng.choice(pool, size=d, replace=False).tolist())
        if nu_:
            upool = unstable[unstable != v]
            k = min(d, len(upool))
            picks += sorted(rng.choice(upool, size=k, replace=False).tolist())
        adjacency[v] = tuple(int(u) for u in picks)
    return GraphSkeleton(
        vertices=tuple(range(1, ns + nu_ + 1)),
        stable=frozenset(range(1, ns + 1)),
        adjacency=adjacency,
    )


def assign_weights(skel: GraphSkeleton, model: RandomGraphModel, rng_seed: int = 0) -> SwitchingDigraph:
    """Sample vertex and edge weights from the model onto a skeleton."""
    rng = make_rng(rng_seed, 1)
    vw = model.sample_vertex_weights(rng, len(skel.vertices))
    edges = skel.edges
    ew = model.sample_edge_weights(rng, len(edges))
    return SwitchingDigraph(
        vertices=skel.vertices,
        stable=skel.stable,
        vertex_weight={v: float(w) for v, w in zip(skel.vertices, vw)},
        edge_weight={e: float(w) for e, w in zip(edges, ew)},
    )


def random_walk_until_closed(
    G: Adjacency,
    rng: np.random.Generator | int = 0,
    start: int | None = None,
    phi: Callable[[int], float] | None = None,
) -> tuple[list[int], int]:
    """Run the greedy randomized walk; returns ``(j_0..j_k, i)`` with ``j_i`` the closing vertex."""
    if phi is not None and not is_nicely_connected(G, phi):
        raise NotNicelyConnected(f"some vertex has fewer than floor(phi)={math.floor(phi(len(G.stable)))} stable out-neighbours")
    if isinstance(rng, (int, np.integer)):
        rng = make_rng(int(rng))
    stable_sorted = sorted(G.stable)
    if not stable_sorted:
        raise DeadEnd("no stable vertex")
    if start is None:
        start = stable_sorted[int(rng.integers(len(stable_sorted)))]
    elif start not in G.stable:
        raise ValueError(f"start vertex {start} is not stable")
    walk = [start]
    position = {start: 0}
    while True:
        here = walk[-1]
        nbrs = sorted(u for u in G.successors(here) if u in G.stable)
        fresh = [u for u in nbrs if u not in position]
        if fresh:
            nxt = fresh[int(rng.integers(len(fresh)))]
            position[nxt] = len(walk)
            walk.append(nxt)
            continue
        if not nbrs:
            raise DeadEnd(f"vertex {here} has no stable out-neighbour")
        close = min(nbrs, key=position.__getitem__)
        return walk, position[close]


def random_cycle(
    G: Adjacency,
    rng_seed: np.random.Generator | int = 0,
    start: int | None = None,
    phi: Callable[[int], float] | None = None,
) -> Walk:
    """Cycle produced by the randomized greedy walk; all vertices stable."""
    walk, i = random_walk_until_closed(G, rng_seed, start=start, phi=phi)
    return Walk(walk[i:] + [walk[i]])


def x_n(cycle: Walk, G: SwitchingDigraph) -> float:
    """Edge-weight sum minus vertex-weight sum with the base vertex counted twice."""
    if not cycle.is_closed():
        raise ValueError("x_n needs a closed walk")
    bad = [v for v in cycle.vertices if v not in G.stable]
    if bad:
        raise UnstableVertexInCycle(f"vertices {sorted(set(bad))} are not stable")
    edge_sum = sum(G.edge_weight[e] for e in cycle.edges)
    vertex_sum = sum(G.vertex_weight[v] for v in cycle.vertices)
    return edge_sum - vertex_sum


def azuma_bound(model: RandomGraphModel, n: int | None = None) -> float:
    """``1 - exp(-(1/2) ((alpha - beta)/(A + B))^2 n)``; ``n`` defaults to ``floor(phi(|P_S|))``."""
    if not model.alpha <= model.beta:
        raise InvalidModel("need alpha <= beta")
    if not (model.A > 0 and model.B > 0):
        raise InvalidModel("A and B must be positive")
    if n is None:
        n = model.min_degree
    r = (model.alpha - model.beta) / (model.A + model.B)
    return float(-math.expm1(-0.5 * r * r * n))


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    empirical: float
    bound: float
    stderr: float
    empirical_xi_bar: float
    cycle: Walk

    def dominates_bound(self, k: float = 3.0) -> bool:
        return self.empirical >= self.bound - k * self.stderr


def sample_statistics(
    model: RandomGraphModel, n: int, trials: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Resampled ``X_n`` and ``xi_bar`` for a stable cycle with ``n`` edges."""
    ew = model.sample_edge_weights(rng, (trials, n))
    vw = model.sample_vertex_weights(rng, (trials, n))
    xi_bar_vals = ew.sum(axis=1) - vw.sum(axis=1)
    return xi_bar_vals - vw[:, 0], xi_bar_vals


def find_cycles_by_length(
    skel: Adjacency,
    rng_seed: int,
    lengths: Iterable[int] | None = None,
    n_runs: int = 50,
    max_attempts: int = 5000,
) -> dict[int, Walk]:
    """Run the randomized walk from random starts and keep the first cycle of each length.

    With ``lengths`` given, runs until each requested length has been seen
    (at most ``max_attempts`` runs); otherwise performs ``n_runs`` runs.
    """
    wanted = None if lengths is None else set(int(n) for n in lengths)
    found: dict[int, Walk] = {}
    budget = n_runs if wanted is None else max_attempts
    for attempt in range(budget):
        cyc = random_cycle(skel, make_rng(rng_seed, 2, attempt))
        found.setdefault(cyc.length, cyc)
        if wanted is not None and wanted <= set(found):
            break
    if wanted is not None:
        missing = sorted(wanted - set(found))
        if missing:
            raise CycleLengthUnavailable(f"no cycle of length {missing} in {budget} runs")
        return {n: found[n] for n in sorted(wanted)}
    return dict(sorted(found.items()))


def monte_carlo_experiment(
    model: RandomGraphModel,
    lengths: Iterable[int] | None = None,
    trials: int = 1000,
    rng_seed: int = 0,
    n_runs: int = 50,
    max_attempts: int = 5000,
) -> list[ExperimentRow]:
    """Empirical probability of ``X_n < 0`` per cycle length, next to the Azuma bound.

    Cycles come from the randomized walk on a generated nicely connected
    graph; for each, the weights on its vertices and edges are resampled
    ``trials`` times. Every row uses an independent random stream.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    model.validate()
    skel = generate_nicely_connected(model, rng_seed)
    cycles = find_cycles_by_length(skel, rng_seed, lengths, n_runs=n_runs, max_attempts=max_attempts)
    rows = []
    for n, cyc in cycles.items():
        xs, xbs = sample_statistics(model, n, trials, make_rng(rng_seed, 3, n))
        p = float(np.mean(xs < 0))
        bound = azuma_bound(model, n)
        rows.append(
            ExperimentRow(
                n=n,
                empirical=p,
                bound=bound,
                stderr=math.sqrt(bound * (1 - bound) / trials),
                empirical_xi_bar=float(np.mean(xbs < 0)),
                cycle=cyc,
            )
        )
    return rows


def experiment_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "empirical", "bound"])
    for r in rows:
        w.writerow([r.n, repr(r.empirical), repr(r.bound)])
    return buf.getvalue()
