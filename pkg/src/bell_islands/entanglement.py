"""Wootters concurrence, via the X-state closed form and the general spectrum."""

from __future__ import annotations

import math

import numpy as np

from .channel import XStateArrays, XStateMatrix
from .errors import DomainError, NumericalError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
# eigenvalues of rho below this are round-off of an exact zero (~ 64 * eps * dim)
ROUNDOFF_EIG = 6e-14

SIGMA_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0])).astype(complex)


def validate_density_matrix(rho) -> np.ndarray:
    """Return ``rho`` as a complex 4x4 array after checking it is a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > HERMITIAN_TOL:
        raise DomainError(f"density matrix has trace {np.trace(rho).real!r}")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def concurrence_x(state: XStateMatrix) -> float:
    c = 2.0 * max(
        0.0,
        abs(state.rho23) - math.sqrt(max(state.rho11 * state.rho44, 0.0)),
        abs(state.rho14) - math.sqrt(max(state.rho22 * state.rho33, 0.0)),
    )
    return min(c, 1.0)


def concurrence_x_many(states: XStateArrays) -> np.ndarray:
    a = np.abs(states.rho23) - np.sqrt(np.clip(states.rho11 * states.rho44, 0.0, None))
    b = np.abs(states.rho14) - np.sqrt(np.clip(states.rho22 * states.rho33, 0.0, None))
    return np.clip(2.0 * np.maximum(np.maximum(a, b), 0.0), 0.0, 1.0)


def concurrence_general(rho) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    The square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy) are
    the singular values of tau = V^dag (sy x sy) V*, where the columns of V
    are the eigenvectors of rho scaled by sqrt(eigenvalue).  Working with
    singular values avoids taking square roots of round-off-sized
    eigenvalues, which would cost ~1e-8 of accuracy on rank-deficient states.
    """
    rho = validate_density_matrix(rho)
    try:
        w, v = np.linalg.eigh(rho)
        w = np.where(w < ROUNDOFF_EIG, 0.0, w)
        vs = v * np.sqrt(w)
        lam = np.linalg.svd(vs.conj().T @ SIGMA_YY @ vs.conj(), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    lam = np.sort(lam)[::-1]
    return float(min(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]), 1.0))
