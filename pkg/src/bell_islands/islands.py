"""Concurrence thresholds, Bell islands, fixed-angle error profiles and sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize

from .bell import b_fix, b_max_many, b_max_x, pq_many
from .channel import (
    BellLikeState,
    Family,
    ReservoirParams,
    decay_probability,
    decay_probability_markovian,
    evolve,
    evolve_many,
)
from .entanglement import concurrence_x, concurrence_x_many
from .errors import DomainError, NoCrossingError, ResolutionError

CLASSICAL_BOUND = 2.0
P_XTOL = 1e-12
T_XTOL = 1e-9
# minimum samples per oscillation period of p(t)
SAMPLES_PER_PERIOD = 50


@dataclass(frozen=True)
class ThresholdResult:
    family: Family
    alpha: float
    c_threshold: float
    p_crossing: float


class MaxThreshold(NamedTuple):
    alpha: float
    c: float

    @property
    def alpha_sq(self) -> float:
        return self.alpha**2

    @property
    def beta(self) -> float:
        return math.sqrt(1.0 - self.alpha**2)


@dataclass(frozen=True)
class BellIsland:
    t_start: float
    t_end: float
    b_peak: float
    t_peak: float
    primary: bool = False

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise DomainError(f"empty island [{self.t_start}, {self.t_end}]")
        if not self.b_peak > CLASSICAL_BOUND:
            raise DomainError(f"island peak {self.b_peak} does not exceed 2")


@dataclass(frozen=True)
class SweepRow:
    alpha_sq: float
    gamma_t: float
    p: float
    concurrence: float
    b_max: float
    b_fix: float
    theta2_opt: float
    violated: bool

    FIELDS = ("alpha_sq", "gamma_t", "p", "concurrence", "b_max", "b_fix", "theta2_opt", "violated")


@dataclass(frozen=True)
class RelativeErrorProfile:
    points: list  # (p, delta_r) pairs; delta_r is None where B_max = 0
    max_joint: Optional[float]  # max delta_r where both B_max > 2 and B_fix > 2
    p_at_max: Optional[float]


def _state(family, alpha: float, delta: float = 0.0) -> BellLikeState:
    return BellLikeState(Family.parse(family), alpha, delta)


def _b_max_at_p(state: BellLikeState, p: float) -> float:
    return b_max_x(evolve(state, min(max(p, 0.0), 1.0)))


def threshold_crossing(family, alpha: float, delta: float = 0.0, n_scan: int = 2001) -> float:
    """Decay probability of the first downward crossing of B_max through 2.

    Bisection on [last scanned p above 2, first scanned p below 2].
    """
    state = _state(family, alpha, delta)
    ps = np.linspace(0.0, 1.0, n_scan)
    excess = b_max_many(evolve_many(state, ps)) - CLASSICAL_BOUND
    if excess[0] <= 0:
        raise NoCrossingError(f"B_max(p=0) = {excess[0] + 2} does not exceed 2 (alpha = {alpha})")
    below = np.flatnonzero(excess < 0)
    if below.size == 0:
        raise NoCrossingError(f"B_max never drops below 2 for alpha = {alpha}")
    i = below[0]
    return optimize.bisect(
        lambda p: _b_max_at_p(state, p) - CLASSICAL_BOUND, ps[i - 1], ps[i], xtol=P_XTOL
    )


def concurrence_threshold(family, alpha: float) -> ThresholdResult:
    """Concurrence at which B_max first falls to 2.

    Phi has the closed form 2ab/(1 + a^2 b^2); Psi is root-found.
    """
    family = Family.parse(family)
    if not (0.0 <= alpha <= 1.0):
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha in (0.0, 1.0):
        raise NoCrossingError(f"alpha = {alpha} is a product state; B_max(p=0) = 2")
    state = _state(family, alpha)
    if family is Family.PHI:
        ab2 = (alpha * state.beta) ** 2
        c = 2.0 * alpha * state.beta / (1.0 + ab2)
        return ThresholdResult(family, alpha, c, ab2 / (1.0 + ab2))
    p_star = threshold_crossing(family, alpha)
    return ThresholdResult(family, alpha, concurrence_x(evolve(state, p_star)), p_star)


def max_threshold(family, n_scan: int = 199) -> MaxThreshold:
    """Largest concurrence threshold over alpha in (0, 1).

    Coarse scan in alpha^2, then bounded Brent refinement around the best
    scan point.
    """
    family = Family.parse(family)

    def neg_c(alpha_sq: float) -> float:
        return -concurrence_threshold(family, math.sqrt(alpha_sq)).c_threshold

    grid = np.linspace(0.0, 1.0, n_scan + 2)[1:-1]
    vals = np.array([neg_c(a) for a in grid])
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(neg_c, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    a2 = float(res.x) if res.fun <= vals[k] else float(grid[k])
    return MaxThreshold(math.sqrt(a2), -neg_c(a2))


def default_time_grid(params: ReservoirParams, gamma_t_max: float, samples_per_period: int = SAMPLES_PER_PERIOD) -> np.ndarray:
    """Grid on [0, gamma_t_max] in units of Gamma*t, at least 50 points per oscillation."""
    if gamma_t_max < 0:
        raise DomainError("t_max must be non-negative")
    if gamma_t_max == 0:
        return np.zeros(1)
    period = params.gamma * params.period
    n = max(1000, math.ceil(gamma_t_max / (period / samples_per_period))) + 1
    return np.linspace(0.0, gamma_t_max, n)


def _check_time_grid(gt: np.ndarray, params: ReservoirParams) -> None:
    if gt.ndim != 1 or gt.size == 0:
        raise DomainError("time grid must be a non-empty 1-D array")
    if gt[0] < 0:
        raise DomainError("time grid must be non-negative")
    steps = np.diff(gt)
    if np.any(steps <= 0):
        raise DomainError("time grid must be strictly increasing")
    limit = params.gamma * params.period / SAMPLES_PER_PERIOD
    if steps.size and steps.max() > limit * (1 + 1e-9):
        raise ResolutionError(
            f"time step {steps.max():.6g} exceeds period/{SAMPLES_PER_PERIOD} = {limit:.6g}; "
            "sign changes of B - 2 could be missed"
        )


def find_islands(
    family,
    alpha: float,
    params: ReservoirParams,
    gamma_t_grid,
    delta: float = 0.0,
    use_b_fix: bool = False,
) -> list[BellIsland]:
    """Maximal time intervals with B > 2, on a grid of dimensionless times Gamma*t.

    A violation interval that starts at the first grid point is the primary
    region (``primary=True``); everything after the first drop below 2 is a
    Bell island.  Endpoints are refined by bisection; an interval running
    into the end of the grid keeps the grid end.
    """
    state = _state(family, alpha, delta)
    gt = np.asarray(gamma_t_grid, dtype=float)
    _check_time_grid(gt, params)

    def bell(gamma_t):
        p = decay_probability(np.asarray(gamma_t) / params.gamma, params)
        if use_b_fix:
            return b_fix(state, p)
        return b_max_many(evolve_many(state, p))

    def bell_scalar(gamma_t: float) -> float:
        return float(np.atleast_1d(bell(gamma_t))[0])

    def excess(gamma_t: float) -> float:
        return bell_scalar(gamma_t) - CLASSICAL_BOUND

    values = np.atleast_1d(bell(gt))
    above = values > CLASSICAL_BOUND
    if not above.any():
        return []
    padded = np.concatenate(([False], above, [False])).astype(np.int8)
    starts = np.flatnonzero(np.diff(padded) == 1)
    ends = np.flatnonzero(np.diff(padded) == -1) - 1

    islands = []
    last = gt.size - 1
    for i, j in zip(starts, ends):
        t0 = gt[0] if i == 0 else optimize.bisect(excess, gt[i - 1], gt[i], xtol=T_XTOL)
        t1 = gt[last] if j == last else optimize.bisect(excess, gt[j], gt[j + 1], xtol=T_XTOL)
        k = i + int(np.argmax(values[i : j + 1]))
        t_peak, b_peak = gt[k], values[k]
        lo, hi = max(gt[max(k - 1, 0)], t0), min(gt[min(k + 1, last)], t1)
        if hi > lo:
            res = optimize.minimize_scalar(lambda s: -bell_scalar(s), bounds=(lo, hi), method="bounded",
                                           options={"xatol": T_XTOL})
            if -res.fun > b_peak:
                t_peak, b_peak = float(res.x), float(-res.fun)
        if t1 <= t0:
            continue
        islands.append(BellIsland(float(t0), float(t1), float(b_peak), float(t_peak), primary=bool(i == 0)))
    return islands


def relative_error_profile(family, alpha: float, p_grid, delta: float = 0.0) -> RelativeErrorProfile:
    """delta_r = (B_max - B_fix)/B_max over a grid of decay probabilities."""
    state = _state(family, alpha, delta)
    ps = np.asarray(p_grid, dtype=float)
    if ps.size and (ps.min() < 0 or ps.max() > 1):
        raise DomainError("p grid must lie in [0, 1]")
    bmax = b_max_many(evolve_many(state, ps))
    bfix = np.atleast_1d(b_fix(state, ps))
    points = []
    best, p_best = None, None
    for p, bm, bf in zip(ps, bmax, bfix):
        if bm == 0.0:
            points.append((float(p), None))
            continue
        dr = float((bm - bf) / bm)
        points.append((float(p), dr))
        if bm > CLASSICAL_BOUND and bf > CLASSICAL_BOUND and (best is None or dr > best):
            best, p_best = dr, float(p)
    return RelativeErrorProfile(points, best, p_best)


def _sweep_row_block(state: BellLikeState, alpha_sq: float, gamma_t: np.ndarray, ps: np.ndarray) -> list[SweepRow]:
    states = evolve_many(state, ps)
    conc = concurrence_x_many(states)
    p_corr, q_coh = pq_many(states)
    bmax = 2.0 * np.hypot(p_corr, q_coh)
    bfix = np.atleast_1d(b_fix(state, ps))
    degenerate = (np.abs(p_corr) <= 1e-12) & (q_coh <= 1e-12)
    theta2 = np.where(degenerate, np.nan, np.arctan2(q_coh, np.abs(p_corr)))
    return [
        SweepRow(alpha_sq, float(t), float(p), float(c), float(bm), float(bf), float(th), bool(bm > CLASSICAL_BOUND))
        for t, p, c, bm, bf, th in zip(gamma_t, ps, conc, bmax, bfix, theta2)
    ]


def sweep(
    family,
    alpha_sq_grid,
    *,
    gamma_t_grid=None,
    p_grid=None,
    params: Optional[ReservoirParams] = None,
    delta: float = 0.0,
    profile: str = "non-markovian",
    workers: int = 1,
) -> list[SweepRow]:
    """Full pipeline on an (alpha^2, time) or (alpha^2, p) grid.

    Rows are ordered with alpha^2 outer and time (or p) inner, independent
    of ``workers``.  In p mode ``gamma_t`` is NaN.  ``profile="markovian"``
    swaps in p = 1 - exp(-Gamma t) and needs no reservoir parameters.
    """
    family = Family.parse(family)
    a2_grid = np.atleast_1d(np.asarray(alpha_sq_grid, dtype=float))
    if a2_grid.size == 0:
        raise DomainError("alpha^2 grid is empty")
    if (gamma_t_grid is None) == (p_grid is None):
        raise DomainError("give exactly one of gamma_t_grid or p_grid")
    if profile not in ("non-markovian", "markovian"):
        raise DomainError(f"unknown channel profile {profile!r}")
    if gamma_t_grid is not None:
        gt = np.atleast_1d(np.asarray(gamma_t_grid, dtype=float))
        if gt.size == 0 or np.any(np.diff(gt) <= 0):
            raise DomainError("time grid must be non-empty and strictly increasing")
        if profile == "markovian":
            ps = np.atleast_1d(decay_probability_markovian(gt))
        elif params is None:
            raise DomainError("a time grid needs reservoir parameters")
        else:
            ps = np.atleast_1d(decay_probability(gt / params.gamma, params))
    else:
        ps = np.atleast_1d(np.asarray(p_grid, dtype=float))
        if ps.size == 0 or np.any(np.diff(ps) <= 0):
            raise DomainError("p grid must be non-empty and strictly increasing")
        gt = np.full(ps.shape, np.nan)

    def block(alpha_sq: float) -> list[SweepRow]:
        try:
            state = BellLikeState.from_alpha_sq(family, alpha_sq, delta)
            return _sweep_row_block(state, float(alpha_sq), gt, ps)
        except (ValueError, ArithmeticError) as exc:
            raise type(exc)(f"{exc} (at alpha_sq={alpha_sq})") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(block, a2_grid))
    else:
        blocks = [block(a) for a in a2_grid]
    return [row for rows in blocks for row in rows]
