"""CHSH correlations, maximal and fixed-angle Bell functions.

Pseudo-spin observables are

    O(theta, phi) = cos(theta) (|1><1| - |0><0|)
                    + sin(theta) (e^{i phi} |1><0| + e^{-i phi} |0><1|)

and the Bell function combines four correlations with a shared azimuth per
qubit:

    B = |E(t1, t2) - E(t1, t2')| + E(t1', t2) + E(t1', t2').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import ALGEBRAIC_TOL, BellLikeState, Family, XStateArrays, XStateMatrix, evolve
from .entanglement import validate_density_matrix
from .errors import DegenerateStateError, DomainError, NumericalError

TWO_PI = 2.0 * math.pi
TSIRELSON = 2.0 * math.sqrt(2.0)

# single-qubit Pauli set in the |1>, |0> ordering; sigma_3 = |1><1| - |0><0|
SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, 1j], [-1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class AngleSet:
    theta1: float
    theta1p: float
    theta2: float
    theta2p: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        polar = (self.theta1, self.theta1p, self.theta2, self.theta2p)
        if not all(math.isfinite(a) for a in polar + (self.phi1, self.phi2)):
            raise DomainError("angles must be finite")
        if any(a < 0 or a > math.pi for a in polar):
            raise DomainError(f"polar angles must lie in [0, pi], got {polar}")
        if not (0 <= self.phi1 < TWO_PI and 0 <= self.phi2 < TWO_PI):
            raise DomainError(f"azimuths must lie in [0, 2*pi), got {(self.phi1, self.phi2)}")


class PQPair(NamedTuple):
    p_corr: float
    q_coh: float


def observable(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s * np.exp(1j * phi)], [s * np.exp(-1j * phi), -c]], dtype=complex)


def _correlation(rho: np.ndarray, o1, o2) -> float:
    val = np.trace(rho @ np.kron(observable(*o1), observable(*o2)))
    if abs(val.imag) > 1e-10:
        raise NumericalError(f"correlation has imaginary part {val.imag}")
    return float(val.real)


def correlation(rho, o1: tuple[float, float], o2: tuple[float, float]) -> float:
    """Tr{rho O(theta1, phi1) x O(theta2, phi2)} for ``o = (theta, phi)``."""
    return _correlation(validate_density_matrix(rho), o1, o2)


def _chsh_terms(rho: np.ndarray, a: AngleSet) -> tuple[float, float]:
    e11 = _correlation(rho, (a.theta1, a.phi1), (a.theta2, a.phi2))
    e12 = _correlation(rho, (a.theta1, a.phi1), (a.theta2p, a.phi2))
    e21 = _correlation(rho, (a.theta1p, a.phi1), (a.theta2, a.phi2))
    e22 = _correlation(rho, (a.theta1p, a.phi1), (a.theta2p, a.phi2))
    return e11 - e12, e21 + e22


def chsh(rho, angles: AngleSet) -> float:
    """Bell function with the absolute value on the first pair of correlations."""
    first, second = _chsh_terms(validate_density_matrix(rho), angles)
    return abs(first) + second


def chsh_signed(rho, angles: AngleSet) -> float:
    """The same combination without the absolute value.

    This is what a fixed-setting experiment measures: the sign of the first
    pair is decided once, by orienting ``theta1``, and then kept.
    """
    first, second = _chsh_terms(validate_density_matrix(rho), angles)
    return first + second


def pq(state: XStateMatrix) -> PQPair:
    p_corr = state.rho11 + state.rho44 - state.rho22 - state.rho33
    q_coh = 2.0 * (abs(state.rho14) + abs(state.rho23))
    if abs(p_corr) > 1 + ALGEBRAIC_TOL or q_coh > 1 + ALGEBRAIC_TOL:
        raise NumericalError(f"P={p_corr}, Q={q_coh} out of range for a valid state")
    return PQPair(p_corr, q_coh)


def b_max_x(state: XStateMatrix) -> float:
    p_corr, q_coh = pq(state)
    return 2.0 * math.hypot(p_corr, q_coh)


def pq_many(states: XStateArrays) -> tuple[np.ndarray, np.ndarray]:
    p_corr = states.rho11 + states.rho44 - states.rho22 - states.rho33
    q_coh = 2.0 * (np.abs(states.rho14) + np.abs(states.rho23))
    return p_corr, q_coh


def b_max_many(states: XStateArrays) -> np.ndarray:
    return 2.0 * np.hypot(*pq_many(states))


def _optimal_azimuths(state: XStateMatrix, k: int, kp: int) -> tuple[float, float]:
    # Maximizing needs phi1 + phi2 = delta14 and phi1 - phi2 = delta23 (mod 2 pi).
    # A vanishing coherence frees its constraint; the freedom goes into phi2 = 0.
    has14 = abs(state.rho14) > ALGEBRAIC_TOL
    has23 = abs(state.rho23) > ALGEBRAIC_TOL
    d14, d23 = state.delta14, state.delta23
    if has14 and has23:
        phi1, phi2 = 0.5 * (d14 + d23), 0.5 * (d14 - d23)
    elif has14:
        phi1, phi2 = d14, 0.0
    else:
        phi1, phi2 = d23, 0.0
    phi1 += (k + kp) * math.pi
    phi2 += (k - kp) * math.pi
    return phi1 % TWO_PI, phi2 % TWO_PI


def optimal_angles(state: XStateMatrix, k: int = 0, kp: int = 0) -> AngleSet:
    """Angles at which the Bell function reaches ``b_max_x(state)``.

    theta1 = 0 and theta1' = pi/2 work for either sign of P because the
    first pair enters through its absolute value.
    """
    p_corr, q_coh = pq(state)
    if abs(p_corr) <= ALGEBRAIC_TOL and q_coh <= ALGEBRAIC_TOL:
        raise DegenerateStateError("P = Q = 0: every angle set gives B = 0")
    theta2 = math.atan2(q_coh, abs(p_corr))
    phi1, phi2 = _optimal_azimuths(state, k, kp)
    return AngleSet(0.0, 0.5 * math.pi, theta2, math.pi - theta2, phi1, phi2)


def fixed_angles(initial: BellLikeState) -> AngleSet:
    """Optimal angles of the initial state, frozen for the whole evolution.

    theta1 is oriented (0 or pi) so that the signed first pair is positive
    at t = 0; ``chsh_signed`` with these angles then reproduces ``b_fix``.
    """
    state0 = evolve(initial, 0.0)
    best = optimal_angles(state0)
    theta1 = math.pi if pq(state0).p_corr < 0 else 0.0
    return AngleSet(theta1, best.theta1p, best.theta2, best.theta2p, best.phi1, best.phi2)


def correlation_tensor(rho) -> np.ndarray:
    rho = validate_density_matrix(rho)
    return np.array([[np.trace(rho @ np.kron(sm, sn)).real for sn in SIGMA] for sm in SIGMA])


def b_max_horodecki(rho) -> float:
    """Maximal CHSH value 2*sqrt(u1 + u2) from the two largest eigenvalues of T^T T."""
    t = correlation_tensor(rho)
    try:
        u = np.linalg.eigvalsh(t.T @ t)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    return 2.0 * math.sqrt(max(u[-1] + u[-2], 0.0))


def b_fix(initial: BellLikeState, p) -> float:
    """Fixed-angle Bell function as a function of the decay probability.

    Not clamped: for the Phi family it turns negative once p > 2/3 at
    maximal entanglement.  Accepts a scalar or array ``p``.
    """
    a2 = initial.alpha**2
    b2 = initial.beta**2
    x = 4.0 * a2 * b2
    p = np.asarray(p, dtype=float)
    if initial.family is Family.PHI:
        bracket = 1.0 + x - (2.0 + x) * p
    else:
        bracket = 1.0 + x - 4.0 * b2 * (a2 + 1.0) * p + 4.0 * b2 * p * p
    out = 2.0 / math.sqrt(1.0 + x) * bracket
    return out if out.ndim else float(out)


def polarizer_angles(angles: AngleSet, atol: float = 1e-9) -> tuple[float, float, float, float]:
    """Linear-polarizer orientations in degrees, half the polar angle.

    Only settings in the real plane are realizable with a polarizer: an
    azimuth of pi flips the sign of the polar angle.  Orientations are
    reported modulo 180 degrees.
    """

    def one(theta: float, phi: float) -> float:
        if math.isclose(math.cos(phi), 1.0, abs_tol=atol):
            signed = theta
        elif math.isclose(math.cos(phi), -1.0, abs_tol=atol):
            signed = -theta
        else:
            raise DomainError(f"azimuth {phi} is not a linear polarization setting")
        deg = math.degrees(signed) / 2.0 % 180.0
        return 0.0 if math.isclose(deg, 180.0, abs_tol=1e-9) else deg

    return (
        one(angles.theta1, angles.phi1),
        one(angles.theta1p, angles.phi1),
        one(angles.theta2, angles.phi2),
        one(angles.theta2p, angles.phi2),
    )
