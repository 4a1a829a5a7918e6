"""Local amplitude-decay dynamics of two qubits in zero-temperature reservoirs.

Every two-qubit matrix in this package uses the ordered basis
``|11>, |10>, |01>, |00>`` (indices 0..3).  Within a single qubit the
ordering is ``|1>, |0>``, so ``np.kron`` of single-qubit operators lands
directly in that two-qubit basis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

ALGEBRAIC_TOL = 1e-12

# |11>, |10>, |01>, |00>
BASIS_LABELS = ("11", "10", "01", "00")


@dataclass(frozen=True)
class ReservoirParams:
    """Lorentzian reservoir: spectral width ``lam`` and Markovian decay rate ``gamma``."""

    lam: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.gamma)):
            raise DomainError("reservoir parameters must be finite")
        if self.lam <= 0 or self.gamma <= 0:
            raise DomainError(f"need lam > 0 and gamma > 0, got lam={self.lam}, gamma={self.gamma}")

    @classmethod
    def strong_coupling(cls, lam: float, gamma: float = 1.0) -> "ReservoirParams":
        params = cls(lam, gamma)
        if not params.is_strong_coupling:
            raise DomainError(f"lam/gamma = {params.ratio} is not < 2")
        return params

    @classmethod
    def from_ratio(cls, ratio: float) -> "ReservoirParams":
        """Dimensionless units: gamma = 1, so times are Gamma*t."""
        return cls.strong_coupling(ratio, 1.0)

    @property
    def ratio(self) -> float:
        return self.lam / self.gamma

    @property
    def is_strong_coupling(self) -> bool:
        return self.ratio < 2.0

    @property
    def d(self) -> float:
        """Oscillation frequency sqrt(2*gamma*lam - lam**2) of the decay amplitude."""
        arg = 2.0 * self.gamma * self.lam - self.lam**2
        if arg <= 0:
            raise DomainError(f"lam/gamma = {self.ratio} >= 2 gives no real oscillation frequency")
        return math.sqrt(arg)

    @property
    def period(self) -> float:
        """Period of p(t) in absolute time."""
        return 2.0 * math.pi / self.d


class Family(enum.Enum):
    PHI = "phi"  # alpha|01> + e^{i delta} beta|10>
    PSI = "psi"  # alpha|00> + e^{i delta} beta|11>

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown family {value!r}; expected 'phi' or 'psi'") from None


@dataclass(frozen=True)
class BellLikeState:
    family: Family
    alpha: float
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if not (0.0 <= self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not (0.0 <= self.delta < 2.0 * math.pi):
            raise DomainError(f"delta must lie in [0, 2*pi), got {self.delta}")

    @classmethod
    def from_alpha_sq(cls, family, alpha_sq: float, delta: float = 0.0) -> "BellLikeState":
        if not (0.0 <= alpha_sq <= 1.0):
            raise DomainError(f"alpha^2 must lie in [0, 1], got {alpha_sq}")
        return cls(Family.parse(family), math.sqrt(alpha_sq), delta)

    @property
    def beta(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha**2))

    def ket(self) -> np.ndarray:
        psi = np.zeros(4, dtype=complex)
        phase = np.exp(1j * self.delta)
        if self.family is Family.PHI:
            psi[2] = self.alpha  # |01>
            psi[1] = phase * self.beta  # |10>
        else:
            psi[3] = self.alpha  # |00>
            psi[0] = phase * self.beta  # |11>
        return psi

    def density_matrix(self) -> np.ndarray:
        psi = self.ket()
        return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class XStateMatrix:
    """Two-qubit state whose only nonzero entries sit on the diagonal and anti-diagonal."""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex
    rho23: complex

    def __post_init__(self):
        pops = (self.rho11, self.rho22, self.rho33, self.rho44)
        if min(pops) < -ALGEBRAIC_TOL:
            raise DomainError(f"negative population in X state: {pops}")
        if abs(sum(pops) - 1.0) > ALGEBRAIC_TOL:
            raise DomainError(f"X state trace is {sum(pops)!r}, not 1")
        if abs(self.rho14) ** 2 > self.rho11 * self.rho44 + ALGEBRAIC_TOL:
            raise DomainError("X state violates |rho14|^2 <= rho11*rho44")
        if abs(self.rho23) ** 2 > self.rho22 * self.rho33 + ALGEBRAIC_TOL:
            raise DomainError("X state violates |rho23|^2 <= rho22*rho33")

    @property
    def delta14(self) -> float:
        return _phase(self.rho14)

    @property
    def delta23(self) -> float:
        return _phase(self.rho23)

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.rho11, self.rho22, self.rho33, self.rho44
        m[0, 3], m[3, 0] = self.rho14, np.conj(self.rho14)
        m[1, 2], m[2, 1] = self.rho23, np.conj(self.rho23)
        return m

    @classmethod
    def from_matrix(cls, rho: np.ndarray, tol: float = ALGEBRAIC_TOL) -> "XStateMatrix":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError(f"expected a 4x4 matrix, got shape {rho.shape}")
        mask = np.ones((4, 4), dtype=bool)
        mask[np.arange(4), np.arange(4)] = False
        mask[np.arange(4), 3 - np.arange(4)] = False
        if np.abs(rho[mask]).max() > tol:
            raise DomainError("matrix is not X-shaped")
        if np.abs(rho.diagonal().imag).max() > tol:
            raise DomainError("diagonal has an imaginary part")
        if abs(rho[0, 3] - np.conj(rho[3, 0])) > tol or abs(rho[1, 2] - np.conj(rho[2, 1])) > tol:
            raise DomainError("matrix is not Hermitian")
        d = rho.diagonal().real
        return cls(float(d[0]), float(d[1]), float(d[2]), float(d[3]), complex(rho[0, 3]), complex(rho[1, 2]))


def _phase(z: complex) -> float:
    """Argument in [0, 2*pi); zero for coherences below the algebraic tolerance."""
    if abs(z) <= ALGEBRAIC_TOL:
        return 0.0
    return float(np.angle(z)) % (2.0 * math.pi)


def _clamp_probability(p):
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise NumericalError("non-finite decay probability")
    if p.size and (p.min() < -ALGEBRAIC_TOL or p.max() > 1.0 + ALGEBRAIC_TOL):
        raise NumericalError(f"decay probability left [0, 1]: range [{p.min()}, {p.max()}]")
    return np.clip(p, 0.0, 1.0)


def decay_amplitude(t, params: ReservoirParams):
    """Excited-state amplitude q(t), with p = 1 - q**2."""
    if not params.is_strong_coupling:
        raise DomainError(
            f"lam/gamma = {params.ratio} >= 2 is outside the strong-coupling closed form; "
            "use decay_probability_markovian for the Markovian profile"
        )
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    lam, d = params.lam, params.d
    q = np.exp(-0.5 * lam * t) * (np.cos(0.5 * d * t) + (lam / d) * np.sin(0.5 * d * t))
    return q if q.ndim else float(q)


def decay_probability(t, params: ReservoirParams):
    """Decay probability p(t) of one qubit in a Lorentzian reservoir at zero temperature.

    Accepts a scalar or an array of times and returns the same shape.  Raises
    :class:`DomainError` for ``t < 0`` or ``lam/gamma >= 2``.
    """
    q = np.asarray(decay_amplitude(t, params))
    p = _clamp_probability(1.0 - q * q)
    return p if p.ndim else float(p)


def decay_probability_markovian(t, gamma: float = 1.0):
    """Markovian profile p = 1 - exp(-gamma*t), kept separate from the strong-coupling form."""
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    p = _clamp_probability(-np.expm1(-gamma * t))
    return p if p.ndim else float(p)


def kraus_operators(p: float) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude-decay Kraus pair in the ``|1>, |0>`` ordering.

    K0 = |0><0| + sqrt(1-p)|1><1|,  K1 = sqrt(p)|0><1|.
    """
    _check_p(p)
    k0 = np.array([[math.sqrt(1.0 - p), 0.0], [0.0, 1.0]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [math.sqrt(p), 0.0]], dtype=complex)
    return k0, k1


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"decay probability must lie in [0, 1], got {p}")


def apply_local_channel(rho: np.ndarray, p: float) -> np.ndarray:
    """Kraus sum over (K_i x K_j) applied to a 4x4 density matrix."""
    ks = kraus_operators(p)
    out = np.zeros((4, 4), dtype=complex)
    for ki in ks:
        for kj in ks:
            k = np.kron(ki, kj)
            out += k @ rho @ k.conj().T
    return out


def evolve(initial: BellLikeState, p: float) -> XStateMatrix:
    """State of the two qubits once each has decayed with probability ``p``."""
    _check_p(p)
    return XStateMatrix.from_matrix(apply_local_channel(initial.density_matrix(), p))


def evolve_at_time(initial: BellLikeState, t: float, params: ReservoirParams) -> XStateMatrix:
    return evolve(initial, decay_probability(t, params))


@dataclass(frozen=True)
class XStateArrays:
    """Columnar X-state elements for many decay probabilities at once."""

    rho11: np.ndarray
    rho22: np.ndarray
    rho33: np.ndarray
    rho44: np.ndarray
    rho14: np.ndarray
    rho23: np.ndarray

    def __len__(self) -> int:
        return len(self.rho11)

    def __getitem__(self, i: int) -> XStateMatrix:
        return XStateMatrix(
            float(self.rho11[i]), float(self.rho22[i]), float(self.rho33[i]), float(self.rho44[i]),
            complex(self.rho14[i]), complex(self.rho23[i]),
        )


def evolve_many(initial: BellLikeState, p) -> XStateArrays:
    """Vectorized Kraus sum: one evolved X state per entry of ``p``."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.size and (p.min() < 0 or p.max() > 1):
        raise DomainError("decay probabilities must lie in [0, 1]")
    n = p.size
    k = np.zeros((2, n, 2, 2), dtype=complex)
    k[0, :, 0, 0] = np.sqrt(1.0 - p)
    k[0, :, 1, 1] = 1.0
    k[1, :, 1, 0] = np.sqrt(p)
    # (K_i x K_j) for all i, j and all p: shape (2, 2, n, 4, 4)
    kk = np.einsum("inab,jncd->ijnacbd", k, k).reshape(2, 2, n, 4, 4)
    rho0 = initial.density_matrix()
    rho = np.einsum("ijnab,bc,ijndc->nad", kk, rho0, kk.conj())
    return XStateArrays(
        rho[:, 0, 0].real, rho[:, 1, 1].real, rho[:, 2, 2].real, rho[:, 3, 3].real,
        rho[:, 0, 3].copy(), rho[:, 1, 2].copy(),
    )
