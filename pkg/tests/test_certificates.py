import dataclasses

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from switchsynth.certificates import (
    StabilityClass,
    certificate_for_lambda,
    check_certificate,
    compute_certificate,
    compute_mu,
    solve_stein,
    spectral_radius,
)
from switchsynth.errors import (
    DimensionMismatch,
    LambdaOnBoundary,
    NotFullRank,
    NotPositiveDefinite,
)

A1 = np.array([[0.2, -0.7], [0.8, 0.3]])
A2 = np.array([[0.5, 0.1], [0.4, 0.2]])


def random_spd(rng, d):
    X = rng.normal(size=(d, d))
    return X @ X.T + 0.1 * np.eye(d)


def full_rank_matrices(max_d=4):
    return st.integers(1, max_d).flatmap(
        lambda d: arrays(np.float64, (d, d), elements=st.floats(-2, 2, allow_nan=False, width=64))
    ).filter(_well_conditioned)


def _well_conditioned(A):
    with np.errstate(all="ignore"):
        return abs(np.linalg.det(A)) > 1e-3 and np.linalg.cond(A) < 1e6


def test_half_identity_closed_form():
    cert = compute_certificate(0.5 * np.eye(2))
    assert cert.lam == pytest.approx(0.2525, abs=1e-15)
    assert cert.stability_class is StabilityClass.STABLE
    np.testing.assert_allclose(cert.P, 101 * np.eye(2), rtol=1e-10)


def test_identity_is_unstable():
    cert = compute_certificate(np.eye(2))
    assert cert.stability_class is StabilityClass.UNSTABLE
    assert cert.lam == pytest.approx(1.01)
    np.testing.assert_allclose(cert.P, 101 * np.eye(2), rtol=1e-10)


def test_example1_a1():
    cert = compute_certificate(A1)
    rho2 = spectral_radius(A1) ** 2
    assert rho2 < cert.lam < 1
    assert check_certificate(A1, cert).ok


def test_reference_lambda2_is_certifiable():
    # the reference value must be certifiable by some P; ours is the Stein one
    cert = certificate_for_lambda(A2, 0.4200)
    assert cert.stability_class is StabilityClass.STABLE
    assert check_certificate(A2, cert).ok


def test_stein_matches_scipy():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3, 4):
        M = rng.normal(size=(d, d))
        M /= 1.5 * spectral_radius(M)
        Q = random_spd(rng, d)
        P = solve_stein(M, Q)
        ref = scipy.linalg.solve_discrete_lyapunov(M.T, Q)
        np.testing.assert_allclose(P, ref, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(M.T @ P @ M - P, -Q, atol=1e-10 * np.abs(P).max())


def test_singular_rejected():
    with pytest.raises(NotFullRank):
        compute_certificate(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        compute_certificate(np.ones((2, 3)))


def test_lambda_on_boundary():
    # rho = 1 with a margin below tol puts lambda within tol of 1
    with pytest.raises(LambdaOnBoundary):
        compute_certificate(np.eye(2), margin=1e-10)


def test_near_boundary_stable_stays_below_one():
    cert = compute_certificate(np.array([[0.999]]))
    assert cert.stability_class is StabilityClass.STABLE
    assert 0.999**2 < cert.lam < 1


def test_mu_trivial_cases():
    assert compute_mu(np.eye(2), np.diag([2.0, 0.5])) == pytest.approx(2.0, abs=1e-14)
    P = random_spd(np.random.default_rng(1), 3)
    assert compute_mu(P, P) == pytest.approx(1.0, abs=1e-12)


def test_mu_errors():
    with pytest.raises(DimensionMismatch):
        compute_mu(np.eye(2), np.eye(3))
    with pytest.raises(NotPositiveDefinite):
        compute_mu(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefinite):
        compute_mu(np.array([[1.0, 0.5], [0.0, 1.0]]), np.eye(2))


def test_mu_defining_inequality_random_spd():
    rng = np.random.default_rng(2)
    P_from, P_to = random_spd(rng, 3), random_spd(rng, 3)
    mu = compute_mu(P_from, P_to)
    xs = rng.normal(size=(10_000, 3))
    v_to = np.einsum("ni,ij,nj->n", xs, P_to, xs)
    v_from = np.einsum("ni,ij,nj->n", xs, P_from, xs)
    assert np.all(v_to <= mu * v_from * (1 + 1e-12))
    w, V = scipy.linalg.eigh(P_to, P_from)
    assert mu == pytest.approx(w[-1], rel=1e-10)
    x = V[:, -1]
    assert x @ P_to @ x == pytest.approx(mu * (x @ P_from @ x), rel=1e-9)


def test_mu_scaling():
    rng = np.random.default_rng(3)
    P, Q = random_spd(rng, 2), random_spd(rng, 2)
    mu = compute_mu(P, Q)
    assert compute_mu(7 * P, 7 * Q) == pytest.approx(mu, rel=1e-12)
    assert compute_mu(P, 7 * Q) == pytest.approx(7 * mu, rel=1e-12)


def test_check_half_identity_zero_violation():
    A = 0.5 * np.eye(2)
    chk = check_certificate(A, compute_certificate(A))
    assert chk.ok and chk.violation == 0


def test_check_halved_lambda_fails():
    cert = compute_certificate(A1)
    bad = dataclasses.replace(cert, lam=cert.lam / 2)
    chk = check_certificate(A1, bad)
    assert not chk.ok and chk.violation < 0


def test_check_wrong_class_fails():
    cert = compute_certificate(A1)
    bad = dataclasses.replace(cert, stability_class=StabilityClass.UNSTABLE)
    assert not check_certificate(A1, bad).ok


def test_check_is_total():
    cert = compute_certificate(A1)
    assert not check_certificate(np.eye(3), cert).ok
    assert not check_certificate("garbage", cert).ok


@settings(max_examples=150, deadline=None)
@given(full_rank_matrices())
def test_certificate_properties(A):
    cert = compute_certificate(A)
    assert check_certificate(A, cert).ok
    rho = spectral_radius(A)
    assert (cert.stability_class is StabilityClass.STABLE) == (rho < 1) == (cert.lam < 1)
    np.testing.assert_array_equal(cert.P, cert.P.T)
    assert np.linalg.eigvalsh(cert.P)[0] > 0
    rng = np.random.default_rng(0)
    xs = rng.normal(size=(1000, A.shape[0]))
    lhs = cert.V((xs @ A.T))
    rhs = cert.lam * cert.V(xs)
    norm2 = np.sum(xs**2, axis=1)
    assert np.all(lhs <= rhs + 1e-9 * np.linalg.norm(cert.P, 2) * cert.lam * norm2)
