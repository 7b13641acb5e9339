import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from switchsynth.digraph import build
from switchsynth.errors import DimensionMismatch, NotClosed
from switchsynth.simulate import (
    SwitchingSignal,
    norms_csv,
    signal_from_walk,
    simulate,
    transient_length,
    verify_gas,
)
from switchsynth.walks import Walk


def test_signal_examples(ex1_graph):
    sig = signal_from_walk(Walk([1, 2, 1]), ex1_graph)
    assert sig.take(6) == [1, 2, 1, 2, 1, 2]
    assert signal_from_walk(Walk([4, 4])).take(5) == [4] * 5
    W = Walk([1, 2, 3, 1])
    assert signal_from_walk(W)(10) == W.vertices[1]
    with pytest.raises(NotClosed):
        signal_from_walk(Walk([1, 2]))


def test_non_contractive_generator_warns(ex1_graph):
    with pytest.warns(UserWarning):
        signal_from_walk(Walk([3, 3]), ex1_graph)


def test_simulate_half_identity():
    traj = simulate({1: 0.5 * np.eye(2)}, lambda t: 1, [1.0, 0.0], 3)
    np.testing.assert_allclose(traj.norms, [1, 0.5, 0.25, 0.125])
    assert traj.signal == (1, 1, 1)


def test_simulate_zero_state(ex1_family):
    traj = simulate(ex1_family, SwitchingSignal(Walk([1, 2, 1])), [0.0, 0.0], 20)
    assert np.all(traj.states == 0)


def test_simulate_errors(ex1_family):
    with pytest.raises(DimensionMismatch):
        simulate(ex1_family, [1, 2], [1.0, 0.0, 0.0], 2)
    with pytest.raises(ValueError):
        simulate(ex1_family, [1, 2], [1.0, 0.0], 5)


def test_example1_period_contraction(ex1_family):
    A21 = ex1_family[2] @ ex1_family[1]
    np.testing.assert_allclose(A21, [[0.18, -0.32], [0.24, -0.22]], atol=1e-15)
    assert np.max(np.abs(np.linalg.eigvals(A21))) == pytest.approx(math.sqrt(0.0372), rel=1e-12)
    # A21 is not normal: one period can shrink the norm by much less than rho
    U, svals, Vt = np.linalg.svd(A21)
    assert svals[0] == pytest.approx(0.48467, abs=1e-5)
    worst = simulate(ex1_family, SwitchingSignal(Walk([1, 2, 1])), Vt[0], 2).norms
    assert worst[2] / worst[0] > 0.2
    A21_10 = np.linalg.matrix_power(A21, 10)
    rate10 = np.linalg.norm(A21_10, 2) ** 0.1
    assert rate10 < 0.21
    rng = np.random.default_rng(0)
    sig = SwitchingSignal(Walk([1, 2, 1]))
    for _ in range(20):
        n = simulate(ex1_family, sig, rng.uniform(-1000, 1000, 2), 60).norms
        assert np.all(n[2::2] <= svals[0] * n[:-2:2] * (1 + 1e-12))
        assert np.all(n[20::2] <= rate10**10 * n[:-20:2] * (1 + 1e-12))


def test_verify_gas_example1(ex1_family):
    rep = verify_gas(ex1_family, SwitchingSignal(Walk([1, 2, 1])))
    assert rep.passed and rep.n_samples == 100 and not rep.failures
    assert rep.worst_final_ratio <= 1e-6
    assert rep.norms.shape == (100, 201)


def test_verify_gas_unstable_signal_fails(ex1_family):
    rep = verify_gas(ex1_family, SwitchingSignal(Walk([3, 3])), n_initial=10)
    assert not rep.passed and len(rep.failures) == 10


def test_verify_gas_zero_box(ex1_family):
    rep = verify_gas(ex1_family, SwitchingSignal(Walk([3, 3])), n_initial=5, box_radius=0.0)
    assert rep.passed


def test_verify_gas_no_samples(ex1_family):
    rep = verify_gas(ex1_family, SwitchingSignal(Walk([1, 2, 1])), n_initial=0)
    assert rep.passed and rep.norms.shape == (0, 201)
    assert norms_csv(rep.norms) == "sample,t,norm\n"


def test_transient_length():
    assert transient_length(np.array([1.0, 2.0, 3.0, 2.0, 1.0]), 1) == 2
    assert transient_length(np.array([3.0, 2.0, 1.0]), 1) == 0


def test_signal_admissible(ex1_graph):
    sig = signal_from_walk(Walk([1, 2, 1]), ex1_graph)
    seq = sig.take(10_000)
    assert all(ex1_graph.has_edge(a, b) for a, b in zip(seq, seq[1:]))


@settings(max_examples=50, deadline=None)
# scales that keep every state clear of the subnormal range
@given(st.integers(0, 2**32 - 1), st.just(0.0) | st.floats(1e-6, 1e3) | st.floats(-1e3, -1e-6))
def test_homogeneity(seed, c):
    fam = {1: np.array([[0.2, -0.7], [0.8, 0.3]]), 2: np.array([[0.5, 0.1], [0.4, 0.2]])}
    x0 = np.random.default_rng(seed).uniform(-1, 1, 2)
    sig = SwitchingSignal(Walk([1, 2, 1]))
    a = simulate(fam, sig, c * x0, 30).states
    b = c * simulate(fam, sig, x0, 30).states
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12 * abs(c) * np.abs(b).max(initial=1))


def test_certificates_hold_along_trajectories(ex1_family):
    # computed certificates; the two per-step inequalities observed in situ
    G = build(ex1_family, [(1, 2), (2, 1)])
    certs = G.certificates
    mu = {e: math.exp(w) for e, w in G.edge_weight.items()}
    sig = SwitchingSignal(Walk([1, 2, 1]))
    rng = np.random.default_rng(5)
    for _ in range(20):
        traj = simulate(ex1_family, sig, rng.uniform(-1000, 1000, 2), 40)
        for t in range(39):
            i, j = sig(t), sig(t + 1)
            x, y = traj.states[t], traj.states[t + 1]
            ci, cj = certs[i], certs[j]
            assert ci.V(y) <= ci.lam * ci.V(x) * (1 + 1e-9)
            assert cj.V(y) <= mu[(i, j)] * ci.V(y) * (1 + 1e-9)
