"""Periodic switching signals from closed walks, and trajectory simulation."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .digraph import SwitchingDigraph
from .errors import DimensionMismatch, NotClosed
from .walks import Walk, xi_bar

DEFAULT_SAMPLES = 100
DEFAULT_RADIUS = 1000.0
DEFAULT_STEPS = 200
DEFAULT_DECAY = 1e-6
DEFAULT_BOUNDEDNESS = 1e3


@dataclass(frozen=True)
class SwitchingSignal:
    """``sigma(t)`` obtained by repeating a closed walk's vertex sequence."""

    generator: Walk

    @property
    def period(self) -> int:
        return self.generator.length

    def __call__(self, t: int) -> int:
        return self.generator.signal_at(t)

    def take(self, T: int) -> list[int]:
        return [self(t) for t in range(T)]


def signal_from_walk(W: Walk, G: SwitchingDigraph | None = None) -> SwitchingSignal:
    if not W.is_closed():
        raise NotClosed(f"{W} is not closed")
    if G is not None:
        W.check(G)
        cost = xi_bar(W, G)
        if not cost < 0:
            warnings.warn(f"generator {W} is not contractive (xi_bar={cost:.6g})", stacklevel=2)
    return SwitchingSignal(W)


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    signal: tuple[int, ...]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def simulate(family: Mapping[int, np.ndarray], sigma, x0, T: int) -> Trajectory:
    """Iterate ``x(t+1) = A_{sigma(t)} x(t)`` for ``t = 0..T-1``.

    ``sigma`` is a :class:`SwitchingSignal`, any callable ``t -> index``, or
    an explicit sequence of at least ``T`` indices.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    x = np.asarray(x0, dtype=float).reshape(-1)
    d = x.shape[0]
    mats = {k: np.asarray(A, dtype=float) for k, A in family.items()}
    for k, A in mats.items():
        if A.shape != (d, d):
            raise DimensionMismatch(f"A_{k} has shape {A.shape}, state has dimension {d}")
    if callable(sigma):
        seq = [sigma(t) for t in range(T)]
    else:
        seq = list(sigma)[:T]
        if len(seq) < T:
            raise ValueError("switching sequence shorter than T")
    states = np.empty((T + 1, d))
    states[0] = x
    for t, k in enumerate(seq):
        states[t + 1] = mats[k] @ states[t]
    return Trajectory(states=states, signal=tuple(seq))


def transient_length(norms: np.ndarray, period: int) -> int:
    """First period index after which period-sampled norms never increase."""
    sampled = norms[::period]
    k = len(sampled) - 1
    while k > 0 and sampled[k] <= sampled[k - 1]:
        k -= 1
    return k


@dataclass
class GasReport:
    passed: bool
    n_samples: int
    worst_final_ratio: float
    worst_peak_ratio: float
    max_transient_periods: int
    failures: list[int]
    norms: np.ndarray

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_samples": self.n_samples,
            "worst_final_ratio": self.worst_final_ratio,
            "worst_peak_ratio": self.worst_peak_ratio,
            "max_transient_periods": self.max_transient_periods,
            "failures": self.failures,
        }


def verify_gas(
    family: Mapping[int, np.ndarray],
    sigma: SwitchingSignal,
    n_initial: int = DEFAULT_SAMPLES,
    box_radius: float = DEFAULT_RADIUS,
    T: int = DEFAULT_STEPS,
    decay_threshold: float = DEFAULT_DECAY,
    rng_seed: int = 0,
    boundedness_factor: float = DEFAULT_BOUNDEDNESS,
) -> GasReport:
    """Simulate from random initial states in a box and test decay and boundedness.

    A sample passes when ``|x(T)| <= decay_threshold |x(0)|`` and no
    ``|x(t)|`` exceeds ``boundedness_factor |x(0)|``. A zero initial state
    passes trivially.
    """
    if n_initial < 0:
        raise ValueError("n_initial must be >= 0")
    d = next(iter(family.values())).shape[0]
    rng = np.random.default_rng(np.random.SeedSequence([int(rng_seed), 4]))
    x0s = rng.uniform(-box_radius, box_radius, size=(n_initial, d))
    seq = sigma.take(T) if isinstance(sigma, SwitchingSignal) else [sigma(t) for t in range(T)]
    period = sigma.period if isinstance(sigma, SwitchingSignal) else 1
    all_norms = np.empty((n_initial, T + 1))
    worst_final = worst_peak = 0.0
    transient = 0
    failures = []
    for s in range(n_initial):
        traj = simulate(family, seq, x0s[s], T)
        norms = traj.norms
        all_norms[s] = norms
        n0 = norms[0]
        if n0 == 0:
            continue
        final_ratio = norms[-1] / n0
        peak_ratio = norms.max() / n0
        worst_final = max(worst_final, final_ratio)
        worst_peak = max(worst_peak, peak_ratio)
        transient = max(transient, transient_length(norms, period))
        if not (final_ratio <= decay_threshold and peak_ratio <= boundedness_factor):
            failures.append(s)
    return GasReport(
        passed=not failures,
        n_samples=n_initial,
        worst_final_ratio=float(worst_final),
        worst_peak_ratio=float(worst_peak),
        max_transient_periods=transient,
        failures=failures,
        norms=all_norms,
    )


def norms_csv(norms: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample", "t", "norm"])
    for s, row in enumerate(norms):
        for t, v in enumerate(row):
            w.writerow([s, t, repr(float(v))])
    return buf.getvalue()
