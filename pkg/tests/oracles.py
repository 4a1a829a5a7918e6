"""Independent reference computations used only by the tests."""

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize


def ode_decay_amplitude(gamma_t, ratio, rtol=1e-12, atol=1e-14):
    """q'' + lam q' + (Gamma lam / 2) q = 0, q(0) = 1, q'(0) = 0, with Gamma = 1."""
    gamma_t = np.atleast_1d(np.asarray(gamma_t, dtype=float))
    lam = ratio

    def rhs(_t, y):
        return [y[1], -lam * y[1] - 0.5 * lam * y[0]]

    sol = solve_ivp(rhs, (0.0, float(gamma_t.max())), [1.0, 0.0], method="DOP853",
                    t_eval=gamma_t, rtol=rtol, atol=atol)
    assert sol.success
    return sol.y[0]


def ode_decay_probability(gamma_t, ratio):
    return 1.0 - ode_decay_amplitude(gamma_t, ratio) ** 2


def dilation_evolve(psi0, p):
    """Evolve a two-qubit pure state by the qubit-reservoir unitary of the decay map.

    Each qubit S couples to its own reservoir R:
        |0_S 0_R> -> |0_S 0_R>
        |1_S 0_R> -> sqrt(1-p)|1_S 0_R> + sqrt(p)|0_S 1_R>
    then both reservoirs are traced out.  Kets use the ordering |11>,|10>,|01>,|00>
    for the qubits; here every factor is indexed 0 -> |0>, 1 -> |1> and the
    result is permuted back at the end.
    """
    # psi0 in the |11>,|10>,|01>,|00> ordering -> amplitude c[s1, s2] with s = 0/1 labels
    c = np.zeros((2, 2), dtype=complex)
    for idx, (s1, s2) in enumerate([(1, 1), (1, 0), (0, 1), (0, 0)]):
        c[s1, s2] = psi0[idx]

    def local(s):
        # returns dict (s_out, r_out) -> amplitude for input |s, 0_R>
        if s == 0:
            return {(0, 0): 1.0}
        return {(1, 0): math.sqrt(1 - p), (0, 1): math.sqrt(p)}

    full = np.zeros((2, 2, 2, 2), dtype=complex)  # s1, r1, s2, r2
    for s1 in (0, 1):
        for s2 in (0, 1):
            for (o1, r1), a1 in local(s1).items():
                for (o2, r2), a2 in local(s2).items():
                    full[o1, r1, o2, r2] += c[s1, s2] * a1 * a2
    rho = np.einsum("arbs,crds->acbd", full, full.conj())  # s1 s1' s2 s2'
    order = [(1, 1), (1, 0), (0, 1), (0, 0)]
    out = np.zeros((4, 4), dtype=complex)
    for i, (a, b) in enumerate(order):
        for j, (c1, d1) in enumerate(order):
            out[i, j] = rho[a, c1, b, d1]
    return out


def wootters_eigvals(rho):
    """Concurrence from sqrt-eigenvalues of rho * rho~ (general non-Hermitian route)."""
    yy = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))
    ev = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _spin(theta, phi):
    n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    return sum(ni * s for ni, s in zip(n, _PAULI))


def brute_chsh_max(rho, restricted=False, starts=40, seed=0):
    """Maximize the CHSH function by multi-start local search.

    ``restricted`` shares one azimuth between the two settings of each qubit;
    otherwise all four directions are free.
    """
    rng = np.random.default_rng(seed)

    def settings(x):
        if restricted:
            t1, t1p, t2, t2p, f1, f2 = x
            return (t1, f1), (t1p, f1), (t2, f2), (t2p, f2)
        return (x[0], x[1]), (x[2], x[3]), (x[4], x[5]), (x[6], x[7])

    def neg(x):
        a, ap, b, bp = (_spin(*s) for s in settings(x))

        def e(u, v):
            return np.trace(rho @ np.kron(u, v)).real

        return -(abs(e(a, b) - e(a, bp)) + e(ap, b) + e(ap, bp))

    n = 6 if restricted else 8
    best = -np.inf
    for _ in range(starts):
        res = minimize(neg, rng.uniform(0, 2 * math.pi, n), method="BFGS")
        best = max(best, -res.fun)
    return best
