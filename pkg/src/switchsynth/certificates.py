"""Quadratic Lyapunov-like certificates for the subsystems of a family.

For each subsystem ``x(t+1) = A x(t)`` we produce a pair ``(P, lam)`` with
``P`` symmetric positive definite and ``A^T P A <= lam P`` in the Loewner
order, together with the transition constants
``mu = lambda_max(P_to P_from^{-1})`` bounding ``V_to <= mu V_from``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    LambdaOnBoundary,
    NotFullRank,
    NotPositiveDefinite,
    NumericalFailure,
)

DEFAULT_MARGIN = 0.01
DEFAULT_TOL = 1e-9
# condition-number ceiling for the vectorized Stein system
_MAX_COND = 1e12


class StabilityClass(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class LyapunovCertificate:
    """Pair ``(P, lam)`` with ``V(x) = x^T P x`` and ``V(Ax) <= lam V(x)``."""

    P: np.ndarray
    lam: float
    stability_class: StabilityClass

    @property
    def is_stable(self) -> bool:
        return self.stability_class is StabilityClass.STABLE

    def V(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the quadratic form on a state or a stack of states (rows)."""
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.P, x)


class CertificateCheck(NamedTuple):
    ok: bool
    violation: float


def _as_square(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DimensionMismatch(f"{name} has non-finite entries")
    return A


def spectral_radius(A) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(A, dtype=float)))))


def solve_stein(M, Q) -> np.ndarray:
    """Solve ``M^T P M - P = -Q`` by vectorization.

    Uses ``vec(M^T P M) = (M^T kron M^T) vec(P)`` and solves the resulting
    ``d^2 x d^2`` linear system directly, which is fine for the small
    state dimensions this package targets.
    """
    M = _as_square(M, "M")
    Q = _as_square(Q, "Q")
    d = M.shape[0]
    if Q.shape != (d, d):
        raise DimensionMismatch(f"Q has shape {Q.shape}, expected {(d, d)}")
    K = np.eye(d * d) - np.kron(M.T, M.T)
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond > _MAX_COND:
        raise NumericalFailure(f"Stein system is ill-conditioned (cond={cond:.3e})")
    # row-major vec on both sides: vec(M^T P M) = kron(M^T, M^T) vec(P)
    P = np.linalg.solve(K, Q.reshape(-1)).reshape(d, d)
    return 0.5 * (P + P.T)


def certificate_for_lambda(A, lam: float) -> LyapunovCertificate:
    """Build ``P`` for a prescribed ``lam > rho(A)^2``.

    ``P`` solves ``(A/sqrt(lam))^T P (A/sqrt(lam)) - P = -I``, so that
    ``A^T P A = lam (P - I)``, which is strictly below ``lam P``.
    """
    A = _as_square(A)
    if not lam > 0:
        raise NumericalFailure(f"lambda must be positive, got {lam}")
    rho = spectral_radius(A)
    if rho * rho >= lam:
        raise NumericalFailure(
            f"lambda={lam} does not exceed rho(A)^2={rho * rho}; no quadratic certificate"
        )
    M = A / math.sqrt(lam)
    P = solve_stein(M, np.eye(A.shape[0]))
    if np.min(np.linalg.eigvalsh(P)) <= 0:
        raise NumericalFailure("Stein solution is not positive definite")
    cls = StabilityClass.STABLE if rho < 1 else StabilityClass.UNSTABLE
    return LyapunovCertificate(P=P, lam=float(lam), stability_class=cls)


def compute_certificate(
    A, margin: float = DEFAULT_MARGIN, tol: float = DEFAULT_TOL
) -> LyapunovCertificate:
    """Canonical certificate with ``lam = rho(A)^2 (1 + margin)``.

    A matrix with ``rho(A) < 1`` is classed Stable. If inflating its
    ``rho^2`` by the margin would reach 1, ``lam`` is taken halfway between
    ``rho^2`` and 1 instead, so Stable always comes with ``lam < 1``.
    """
    A = _as_square(A)
    if not margin > 0:
        raise ValueError("margin must be positive")
    if np.linalg.matrix_rank(A) < A.shape[0]:
        raise NotFullRank("subsystem matrix is singular")
    rho = spectral_radius(A)
    lam = rho * rho * (1.0 + margin)
    if rho < 1 and lam >= 1 - tol:
        lam = 0.5 * (rho * rho + 1.0)
    if abs(lam - 1.0) <= tol:
        raise LambdaOnBoundary(f"lambda={lam!r} is within {tol} of 1; adjust the margin")
    return certificate_for_lambda(A, lam)


def _check_spd(P, name: str) -> np.ndarray:
    P = _as_square(P, name)
    if not np.allclose(P, P.T, rtol=1e-10, atol=1e-12 * max(1.0, np.abs(P).max())):
        raise NotPositiveDefinite(f"{name} is not symmetric")
    try:
        np.linalg.cholesky(P)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"{name} is not positive definite") from None
    return P


def compute_mu(P_from, P_to) -> float:
    """Smallest ``mu`` with ``x^T P_to x <= mu x^T P_from x`` for all ``x``.

    Equal to the largest generalized eigenvalue of ``(P_to, P_from)``;
    computed on the symmetric matrix ``L^{-1} P_to L^{-T}`` where
    ``P_from = L L^T``.
    """
    P_from = _check_spd(P_from, "P_from")
    P_to = _check_spd(P_to, "P_to")
    if P_from.shape != P_to.shape:
        raise DimensionMismatch(f"shapes differ: {P_from.shape} vs {P_to.shape}")
    L = np.linalg.cholesky(P_from)
    X = np.linalg.solve(L, P_to)
    S = np.linalg.solve(L, X.T)
    S = 0.5 * (S + S.T)
    return float(np.linalg.eigvalsh(S)[-1])


def check_certificate(A, cert: LyapunovCertificate, tol: float = DEFAULT_TOL) -> CertificateCheck:
    """Verify ``A^T P A <= lam P``, ``P > 0`` and the class-appropriate ``lam`` range.

    ``violation`` is the most negative eigenvalue of ``lam P - A^T P A``
    (0 when none is negative). Never raises.
    """
    try:
        A = np.asarray(A, dtype=float)
        P = np.asarray(cert.P, dtype=float)
        if A.ndim != 2 or P.shape != A.shape:
            return CertificateCheck(False, math.inf)
        scale = max(1.0, float(np.linalg.norm(cert.lam * P, 2)))
        gap = cert.lam * P - A.T @ P @ A
        min_eig = float(np.linalg.eigvalsh(0.5 * (gap + gap.T))[0])
        violation = min(0.0, min_eig)
        spd = np.allclose(P, P.T, atol=tol * scale) and float(np.linalg.eigvalsh(0.5 * (P + P.T))[0]) > 0
        if cert.stability_class is StabilityClass.STABLE:
            lam_ok = 0 < cert.lam < 1
        else:
            lam_ok = cert.lam > 1
        ok = bool(spd and lam_ok and min_eig >= -tol * scale)
        return CertificateCheck(ok, violation)
    except (np.linalg.LinAlgError, ValueError, TypeError):
        return CertificateCheck(False, math.inf)
