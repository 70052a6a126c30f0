"""Reference computations that share no code with the package.

The cvxpy models are written directly from the defining optimization
problems; the analytic formulas are closed forms for special cases.
"""

from __future__ import annotations

import itertools

import numpy as np

try:
    import cvxpy as cp
except ImportError:  # pragma: no cover
    cp = None


def _solve(prob):
    for solver in ("CLARABEL", "SCS"):
        if solver in cp.installed_solvers():
            prob.solve(solver=solver)
            return prob.value
    raise RuntimeError("no SDP solver available for cvxpy")


def cvx_compat_norm(a: np.ndarray) -> float:
    """min lam s.t. A_i = sum_l eps_l(i) K_l, sum K_l <= lam I, K_l >= 0."""
    a = np.array(a, dtype=complex)
    g, d = a.shape[0], a.shape[1]
    signs = list(itertools.product((1, -1), repeat=g))
    ks = [cp.Variable((d, d), hermitian=True) for _ in signs]
    lam = cp.Variable()
    cons = [k >> 0 for k in ks]
    cons.append(lam * np.eye(d) - sum(ks) >> 0)
    for i in range(g):
        cons.append(sum(s[i] * k for s, k in zip(signs, ks)) == a[i])
    return float(_solve(cp.Problem(cp.Minimize(lam), cons)))


def cvx_wit_norm(x: np.ndarray) -> float:
    """max over states rho of sum_i ||rho^1/2 X_i rho^1/2||_1, via its SDP dual form.

    Written as: min lam s.t. X_i = P_i - N_i, P_i, N_i >= 0, sum (P_i + N_i) <= lam I.
    """
    x = np.array(x, dtype=complex)
    g, d = x.shape[0], x.shape[1]
    ps = [cp.Variable((d, d), hermitian=True) for _ in range(g)]
    ns = [cp.Variable((d, d), hermitian=True) for _ in range(g)]
    lam = cp.Variable()
    cons = [p >> 0 for p in ps] + [n >> 0 for n in ns]
    cons += [ps[i] - ns[i] == x[i] for i in range(g)]
    cons.append(lam * np.eye(d) - sum(ps) - sum(ns) >> 0)
    return float(_solve(cp.Problem(cp.Minimize(lam), cons)))


def cvx_lp(c, a_eq, b_eq):
    """min c.x s.t. A x = b, x >= 0."""
    x = cp.Variable(len(c))
    return float(_solve(cp.Problem(cp.Minimize(c @ x), [a_eq @ x == b_eq, x >= 0])))


def qubit_pair_compat_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Compatibility norm of (a.sigma, b.sigma) for real 3-vectors a, b.

    Two unbiased qubit effects (I + a.sigma)/2, (I + b.sigma)/2 are jointly
    measurable iff |a + b| + |a - b| <= 2; the norm is the gauge of that set.
    """
    return 0.5 * (np.linalg.norm(a + b) + np.linalg.norm(a - b))


def bloch(v: np.ndarray) -> np.ndarray:
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    return np.einsum("k,kab->ab", v, sig)


def mub_pair(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Computational and Fourier bases as rank-one projective measurements."""
    comp = np.array([np.outer(e, e) for e in np.eye(d)], dtype=complex)
    f = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d) / np.sqrt(d)
    four = np.array([np.outer(f[:, k], f[:, k].conj()) for k in range(d)])
    return comp, four


def mub_visibility(d: int) -> float:
    """Joint-measurability threshold of two conjugate bases under uniform noise."""
    return (d + np.sqrt(d) - 2) / (2 * (d - 1))
