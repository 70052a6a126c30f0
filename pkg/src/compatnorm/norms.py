"""Tensor norms on R^g (x) Herm_d with primal/dual certificates.

A tuple ``A = (A_1, ..., A_g)`` of d x d Hermitian matrices is read as the
tensor ``sum_i e_i (x) A_i``. The norms implemented here:

============================  =====================================  ===========
function                      norm                                   unit ball
============================  =====================================  ===========
:func:`compat_norm`           compatibility norm ``||.||_c``         compatible tuples
:func:`compat_dual_norm`      its dual ``||.||_c*``                  incompatibility witnesses
:func:`inj_norm_linf`         ``l_inf^g (x)_eps S_inf^d``            effect tuples
:func:`proj_norm_l1`          ``l_1^g (x)_pi S_1^d``                 effect witnesses
:func:`inj_norm_l1`           ``l_1^g (x)_eps S_inf^d``              W^max(B_l1)
:func:`wit_norm`              ``sup_rho sum ||rho^1/2 X_i rho^1/2||_1``  W^min(B_l1)
============================  =====================================  ===========
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput, SolverError, TooManyMeasurements
from .hermit import (
    herm,
    hermitian,
    hermitian_basis,
    psd_sqrt,
    random_instance,
    schatten_norm,
)
from .sdp import TOL_GAP, SdpBuilder, SdpSolution, Status, Term, solve

G_MAX = 8
INJ_G_MAX = 30


@dataclass(frozen=True, eq=False)
class ObservableTuple:
    """``g`` Hermitian ``d x d`` matrices stored as a read-only ``(g, d, d)`` array."""

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] < 1 or c.shape[1] < 1:
            raise InvalidInput(f"expected components of shape (g, d, d), got {c.shape}")
        if not c.flags.writeable and c.dtype == complex:
            return
        c = np.array(c, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @classmethod
    def of(cls, matrices: Sequence) -> "ObservableTuple":
        """Build from a sequence of matrices, validating each as Hermitian."""
        mats = [hermitian(m) for m in matrices]
        if not mats:
            raise InvalidInput("a tuple needs at least one component")
        d = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape[0] != d:
                raise InvalidInput(f"component {i} has dimension {m.shape[0]}, expected {d}")
        return cls(np.array(mats))

    @property
    def g(self) -> int:
        return self.components.shape[0]

    @property
    def d(self) -> int:
        return self.components.shape[1]

    def __len__(self) -> int:
        return self.g

    def __getitem__(self, i) -> np.ndarray:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other: "ObservableTuple") -> "ObservableTuple":
        return ObservableTuple(self.components + other.components)

    def __sub__(self, other: "ObservableTuple") -> "ObservableTuple":
        return ObservableTuple(self.components - other.components)

    def __neg__(self) -> "ObservableTuple":
        return ObservableTuple(-self.components)

    def __mul__(self, t) -> "ObservableTuple":
        """Scalar multiple, or componentwise scaling by a length-g vector."""
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return ObservableTuple(self.components * t)
        if t.shape != (self.g,):
            raise InvalidInput(f"scaling vector must have length {self.g}")
        return ObservableTuple(self.components * t[:, None, None])

    __rmul__ = __mul__

    def __truediv__(self, t) -> "ObservableTuple":
        return self * (1.0 / np.asarray(t, dtype=float))

    def is_zero(self) -> bool:
        return not np.any(self.components)

    def pairing(self, other: "ObservableTuple") -> float:
        """``<self, other> = sum_i Tr[self_i other_i]``."""
        return float(np.einsum("iab,iba->", self.components, other.components).real)

    def allclose(self, other: "ObservableTuple", atol: float = 1e-9) -> bool:
        return self.components.shape == other.components.shape and bool(
            np.max(np.abs(self.components - other.components), initial=0.0) <= atol
        )

    @classmethod
    def zeros(cls, g: int, d: int) -> "ObservableTuple":
        return cls(np.zeros((g, d, d), dtype=complex))

    @classmethod
    def pure_tensor(cls, z: Sequence[float], h) -> "ObservableTuple":
        """``z (x) H`` as the tuple ``(z_1 H, ..., z_g H)``."""
        z = np.asarray(z, dtype=float)
        h = hermitian(h)
        return cls(z[:, None, None] * h[None])

    @classmethod
    def random(cls, g: int, d: int, seed, kind: str = "hermitian_gaussian") -> "ObservableTuple":
        rng = np.random.default_rng(seed)
        return cls(np.array([random_instance(kind, d, rng) for _ in range(g)]))


@lru_cache(maxsize=None)
def sign_vectors(g: int) -> np.ndarray:
    """All of ``{+1, -1}^g`` in lexicographic order, ``+1`` before ``-1``."""
    out = np.array(list(itertools.product((1, -1), repeat=g)), dtype=float).reshape(-1, g)
    out.setflags(write=False)
    return out


def signed_sums(x: ObservableTuple, signs: np.ndarray) -> np.ndarray:
    """``sum_i eps_i X_i`` for each row ``eps`` of ``signs``."""
    return np.einsum("li,iab->lab", signs, x.components)


def _check_g(g: int, g_max: int) -> None:
    if g > g_max:
        raise TooManyMeasurements(
            f"g = {g} exceeds g_max = {g_max} (the SDP has 2^g blocks); raise g_max to override"
        )


def _require_optimal(sol: SdpSolution, what: str) -> None:
    if sol.status is not Status.OPTIMAL:
        raise SolverError(
            f"{what}: solver returned {sol.status.value} after {sol.iterations} iterations "
            f"(gap {sol.gap:.2e}, residuals {sol.primal_residual:.2e}/{sol.dual_residual:.2e})",
            solution=sol,
        )


class SolveInfo(NamedTuple):
    iterations: int
    gap: float
    primal_value: float
    dual_value: float


def _info(sol: SdpSolution) -> SolveInfo:
    return SolveInfo(sol.iterations, sol.gap, sol.primal_value, sol.dual_value)


# --- compatibility norm -----------------------------------------------------


@dataclass(frozen=True)
class CompatDecomposition:
    """``A = sum_l eps_l (x) K_l`` with ``K_l >= 0`` and ``sum_l K_l <= value * I``."""

    signs: np.ndarray
    blocks: np.ndarray  # (2^g, d, d)
    value: float

    def reconstruct(self) -> ObservableTuple:
        return ObservableTuple(np.einsum("li,lab->iab", self.signs, self.blocks))

    def total(self) -> np.ndarray:
        return herm(self.blocks.sum(axis=0))


@dataclass(frozen=True)
class WitnessCertificate:
    """Dual feasible point: ``rho`` a state, ``rho - sum_i eps_i phi_i >= 0`` for all signs."""

    state: np.ndarray
    components: ObservableTuple
    value: float

    def min_slack_eigenvalue(self) -> float:
        signs = sign_vectors(self.components.g)
        slacks = self.state[None] - signed_sums(self.components, signs)
        return float(np.min(np.linalg.eigvalsh(herm(slacks))))

    def pairing(self, a: ObservableTuple) -> float:
        return self.components.pairing(a)


class CompatNormResult(NamedTuple):
    value: float
    primal: CompatDecomposition
    dual: WitnessCertificate
    info: SolveInfo


def compat_norm(
    a: ObservableTuple, g_max: int = G_MAX, tol_gap: float = TOL_GAP
) -> CompatNormResult:
    """Compatibility norm ``||A||_c`` with a decomposition and a dual witness.

    Solves::

        minimize   lam
        s.t.       A = sum_l eps_l (x) K_l,   sum_l K_l <= lam I,   K_l >= 0

    over all ``2^g`` sign vectors ``eps_l``. The dual multipliers give
    ``(rho, phi)`` with ``rho - sum_i eps_i phi_i >= 0`` and ``Tr rho = 1``,
    whose pairing ``sum_i Tr[phi_i A_i]`` equals the norm.
    """
    g, d = a.g, a.d
    _check_g(g, g_max)
    signs = sign_vectors(g)
    if a.is_zero():
        zeros = np.zeros((len(signs), d, d), dtype=complex)
        cert = WitnessCertificate(np.eye(d, dtype=complex) / d, ObservableTuple.zeros(g, d), 0.0)
        return CompatNormResult(0.0, CompatDecomposition(signs, zeros, 0.0), cert, SolveInfo(0, 0.0, 0.0, 0.0))

    bld = SdpBuilder()
    ks = bld.add_blocks(d, len(signs))
    lam = bld.add_block(1)
    bld.set_objective(lam, [[1.0]])
    rows_a = []
    for i in range(g):
        rows_a.append(bld.add_matrix_equality([Term(k, signs[l, i]) for l, k in enumerate(ks)], a[i]))
    frag = bld.add_inequality([Term(k) for k in ks], Term(lam, matrix=np.eye(d)))
    rows_ineq = list(range(len(bld.constraints) - len(frag.constraints), len(bld.constraints)))
    sol = solve(bld.build(), tol_gap=tol_gap)
    _require_optimal(sol, "compat_norm")

    blocks = np.array([sol.primal_blocks[k] for k in ks])
    value = float(sol.primal_value)
    decomposition = CompatDecomposition(signs, blocks, value)

    basis = hermitian_basis(d)
    y = sol.dual_multipliers
    phi = np.array([np.einsum("k,kab->ab", y[r], basis) for r in rows_a])
    rho = -np.einsum("k,kab->ab", y[rows_ineq], basis)
    cert = _witness_from_dual(herm(rho), ObservableTuple(herm(phi)), a)
    return CompatNormResult(value, decomposition, cert, _info(sol))


def _witness_from_dual(rho: np.ndarray, phi: ObservableTuple, a: ObservableTuple) -> WitnessCertificate:
    # Tr rho <= 1 at a dual feasible point; pad with the maximally mixed state.
    d = rho.shape[0]
    tr = float(np.trace(rho).real)
    if tr < 1.0:
        rho = rho + (1.0 - tr) / d * np.eye(d)
    elif tr > 1.0:
        rho = rho / tr
        phi = phi / tr
    rho = herm(rho)
    return WitnessCertificate(rho, phi, phi.pairing(a))


class DualNormResult(NamedTuple):
    value: float
    state: np.ndarray
    maximizer: ObservableTuple
    info: SolveInfo


def compat_dual_norm(
    phi: ObservableTuple, g_max: int = G_MAX, tol_gap: float = TOL_GAP
) -> DualNormResult:
    """Dual compatibility norm ``||phi||_c* = inf{Tr rho : rho >= sum_i eps_i phi_i for all eps}``.

    Computed through its dual, ``max <phi, A>`` over ``||A||_c <= 1``, whose
    multipliers give the optimal ``rho``. ``state`` is ``rho / Tr rho``;
    ``maximizer`` is the optimal ``A``.
    """
    g, d = phi.g, phi.d
    _check_g(g, g_max)
    signs = sign_vectors(g)
    if phi.is_zero():
        return DualNormResult(0.0, np.eye(d, dtype=complex) / d, ObservableTuple.zeros(g, d), SolveInfo(0, 0.0, 0.0, 0.0))

    bld = SdpBuilder()
    ks = bld.add_blocks(d, len(signs))
    sums = signed_sums(phi, signs)
    for l, k in enumerate(ks):
        bld.set_objective(k, -sums[l])
    frag = bld.add_inequality([Term(k) for k in ks], np.eye(d, dtype=complex))
    rows = list(range(len(bld.constraints) - len(frag.constraints), len(bld.constraints)))
    sol = solve(bld.build(), tol_gap=tol_gap)
    _require_optimal(sol, "compat_dual_norm")

    value = -float(sol.primal_value)
    rho = herm(-np.einsum("k,kab->ab", sol.dual_multipliers[rows], hermitian_basis(d)))
    tr = float(np.trace(rho).real)
    state = rho / tr if tr > 0 else np.eye(d, dtype=complex) / d
    blocks = np.array([sol.primal_blocks[k] for k in ks])
    maximizer = ObservableTuple(np.einsum("li,lab->iab", signs, blocks))
    return DualNormResult(value, herm(state), maximizer, _info(sol))


# --- witness norm ---------------------------------------------------------------


@dataclass(frozen=True)
class L1MinDecomposition:
    """``X_i = P_i - N_i`` with ``P_i, N_i >= 0`` and ``sum_i (P_i + N_i) <= value * I``."""

    positives: np.ndarray
    negatives: np.ndarray
    value: float

    def reconstruct(self) -> ObservableTuple:
        return ObservableTuple(self.positives - self.negatives)

    def total(self) -> np.ndarray:
        return herm(self.positives.sum(axis=0) + self.negatives.sum(axis=0))


class WitNormResult(NamedTuple):
    value: float
    decomposition: L1MinDecomposition
    info: SolveInfo


def wit_norm(x: ObservableTuple, tol_gap: float = TOL_GAP) -> WitNormResult:
    """``||X||_wit``, computed as the gauge of ``W^min(B_l1)``::

        minimize lam  s.t.  X_i = P_i - N_i,  sum_i (P_i + N_i) <= lam I,  P_i, N_i >= 0
    """
    g, d = x.g, x.d
    if x.is_zero():
        z = np.zeros((g, d, d), dtype=complex)
        return WitNormResult(0.0, L1MinDecomposition(z, z.copy(), 0.0), SolveInfo(0, 0.0, 0.0, 0.0))
    bld = SdpBuilder()
    ps = bld.add_blocks(d, g)
    ns = bld.add_blocks(d, g)
    lam = bld.add_block(1)
    bld.set_objective(lam, [[1.0]])
    for i in range(g):
        bld.add_matrix_equality([Term(ps[i]), Term(ns[i], -1.0)], x[i])
    bld.add_inequality([Term(k) for k in ps + ns], Term(lam, matrix=np.eye(d)))
    sol = solve(bld.build(), tol_gap=tol_gap)
    _require_optimal(sol, "wit_norm")
    dec = L1MinDecomposition(
        np.array([sol.primal_blocks[k] for k in ps]),
        np.array([sol.primal_blocks[k] for k in ns]),
        float(sol.primal_value),
    )
    return WitNormResult(dec.value, dec, _info(sol))


def wit_objective(x: ObservableTuple, rho: np.ndarray) -> float:
    """``sum_i ||rho^1/2 X_i rho^1/2||_1`` for one state ``rho``."""
    r = psd_sqrt(rho)
    sandwiched = herm(r[None] @ x.components @ r[None])
    return float(np.sum(np.abs(np.linalg.eigvalsh(sandwiched))))


def wit_norm_sample_lb(x: ObservableTuple, n_samples: int, seed) -> float:
    """Monte-Carlo lower bound on ``||X||_wit`` from sampled states.

    Evaluates the objective at ``I/d``, then alternates Hilbert-Schmidt
    random mixed states and Haar-random pure states. For a pure state the
    objective reduces to ``sum_i |<psi|X_i|psi>|``.
    """
    if n_samples < 1:
        raise InvalidInput("n_samples must be >= 1")
    d = x.d
    if x.is_zero():
        return 0.0
    best = wit_objective(x, np.eye(d) / d)
    rng = np.random.default_rng(seed)
    for s in range(n_samples):
        if s % 2 == 0:
            best = max(best, wit_objective(x, random_instance("density_hs", d, rng)))
        else:
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            v /= np.linalg.norm(v)
            vals = np.einsum("a,iab,b->i", v.conj(), x.components, v).real
            best = max(best, float(np.sum(np.abs(vals))))
    return best


# --- closed-form norms ----------------------------------------------------------


def inj_norm_l1(x: ObservableTuple) -> float:
    """``max_eps ||sum_i eps_i X_i||_inf`` (injective norm on ``l_1^g (x) S_inf^d``).

    ``eps`` and ``-eps`` give the same value, so only ``eps_1 = +1`` is enumerated.
    """
    g = x.g
    if g > INJ_G_MAX:
        raise TooManyMeasurements(f"g = {g} exceeds the sign-enumeration limit {INJ_G_MAX}")
    best = 0.0
    chunk = 1 << 12
    total = 1 << (g - 1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        bits = (idx[:, None] >> np.arange(g - 2, -1, -1)) & 1 if g > 1 else np.zeros((len(idx), 0), int)
        signs = np.hstack([np.ones((len(idx), 1)), 1.0 - 2.0 * bits])
        w = np.linalg.eigvalsh(herm(signed_sums(x, signs)))
        best = max(best, float(np.max(np.abs(w[:, [0, -1]]))))
    return best


def proj_norm_l1(x: ObservableTuple) -> float:
    """``sum_i ||X_i||_1`` (projective norm on ``l_1^g (x) S_1^d``)."""
    return float(sum(schatten_norm(c, 1) for c in x))


def inj_norm_linf(a: ObservableTuple) -> float:
    """``max_i ||A_i||_inf`` (injective norm on ``l_inf^g (x) S_inf^d``)."""
    w = np.linalg.eigvalsh(herm(a.components))
    return float(np.max(np.abs(w[:, [0, -1]])))

