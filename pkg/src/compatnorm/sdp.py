"""Small block-diagonal semidefinite programs over complex Hermitian matrices.

Problems are posed in equality standard form::

    minimize    sum_b Tr[C_b X_b]
    subject to  sum_b Tr[A_jb X_b] = b_j      (j = 1..m)
                X_b >= 0

with the dual

    maximize    b . y
    subject to  S_b = C_b - sum_j y_j A_jb >= 0.

:func:`solve` is an infeasible-start primal-dual interior-point method using
the Nesterov-Todd search direction with a Mehrotra predictor-corrector. It
is meant for the problem sizes in this package (tens of blocks of dimension
<= 8 and at most a few hundred equality constraints), where dense linear
algebra on the Schur complement is cheap.

On optima without strict complementarity the attainable relative gap is
about the square root of machine precision (~1e-8); such inputs can end in
``NumericalLimit`` at the default ``tol_gap`` and need a looser one.

:class:`SdpBuilder` assembles problems from PSD block variables, scalar
equalities and operator (in)equalities between affine matrix expressions.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import InvalidInput
from .hermit import herm, hermitian_basis

TOL_GAP = 1e-8
TOL_FEAS = 1e-9
MAX_ITER = 200
REFINE_STEPS = 2
SCHUR_RCOND = 1e-10
SCHUR_EIG_CUTOFF = 1e-14


class Status(str, Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    NUMERICAL_LIMIT = "NumericalLimit"


class RedundantConstraintWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Constraint:
    """``sum_b Tr[coeffs[b] @ X_b] = rhs``; blocks absent from ``coeffs`` have zero coefficient."""

    coeffs: Mapping[int, np.ndarray]
    rhs: float


@dataclass(frozen=True)
class SdpProblem:
    blocks: tuple[int, ...]
    objective: tuple[np.ndarray, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if not self.blocks:
            raise InvalidInput("problem has no blocks")
        for n in self.blocks:
            if not isinstance(n, (int, np.integer)) or n < 1:
                raise InvalidInput(f"block dimensions must be positive integers, got {n!r}")
        if len(self.objective) != len(self.blocks):
            raise InvalidInput("need exactly one objective matrix per block")
        for b, (n, c) in enumerate(zip(self.blocks, self.objective)):
            if np.shape(c) != (n, n):
                raise InvalidInput(f"objective block {b} has shape {np.shape(c)}, expected {(n, n)}")
        for j, con in enumerate(self.constraints):
            for b, a in con.coeffs.items():
                if not 0 <= b < len(self.blocks):
                    raise InvalidInput(f"constraint {j} references unknown block {b}")
                n = self.blocks[b]
                if np.shape(a) != (n, n):
                    raise InvalidInput(
                        f"constraint {j}, block {b}: shape {np.shape(a)}, expected {(n, n)}"
                    )
            if not np.isfinite(con.rhs):
                raise InvalidInput(f"constraint {j} has non-finite right-hand side")

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def to_json(self) -> dict:
        """Self-describing dump for cross-checking with external solvers."""

        def mat(a):
            a = np.asarray(a, dtype=complex)
            return {"d": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}

        return {
            "format": "compatnorm-sdp/1",
            "sense": "minimize sum_b Tr[C_b X_b] s.t. sum_b Tr[A_jb X_b] = b_j, X_b psd",
            "blocks": [int(n) for n in self.blocks],
            "objective": [mat(c) for c in self.objective],
            "constraints": [
                {"rhs": float(c.rhs), "coeffs": {str(b): mat(a) for b, a in sorted(c.coeffs.items())}}
                for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SdpProblem":
        def mat(m):
            re = np.asarray(m["re"], dtype=float)
            im = np.asarray(m.get("im", np.zeros_like(re)), dtype=float)
            return re + 1j * im

        return cls(
            blocks=tuple(int(n) for n in doc["blocks"]),
            objective=tuple(mat(c) for c in doc["objective"]),
            constraints=tuple(
                Constraint({int(b): mat(a) for b, a in c["coeffs"].items()}, float(c["rhs"]))
                for c in doc["constraints"]
            ),
        )

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


@dataclass(frozen=True)
class SdpSolution:
    status: Status
    primal_blocks: tuple[np.ndarray, ...]
    dual_multipliers: np.ndarray
    dual_slacks: tuple[np.ndarray, ...]
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    primal_residual: float
    dual_residual: float
    # Farkas ray for infeasible statuses: y (PrimalInfeasible) or X blocks (DualInfeasible).
    certificate: object = None
    dropped_constraints: tuple[int, ...] = field(default=())

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# --- building problems ------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """One summand of an affine matrix expression.

    ``scale * X_block`` when ``matrix`` is None (block must have the
    expression's dimension), otherwise ``X_block[0, 0] * matrix`` for a
    1x1 (scalar) block.
    """

    block: int
    scale: float = 1.0
    matrix: np.ndarray | None = None


@dataclass(frozen=True)
class InequalityFragment:
    """Result of :func:`build_inequality`: the slack block (if any) and new equality rows."""

    slack_block: int | None
    constraints: tuple[Constraint, ...]


class SdpBuilder:
    def __init__(self):
        self.blocks: list[int] = []
        self.objective: dict[int, np.ndarray] = {}
        self.constraints: list[Constraint] = []

    def add_block(self, dim: int) -> int:
        if dim < 1:
            raise InvalidInput(f"block dimension must be positive, got {dim}")
        self.blocks.append(int(dim))
        return len(self.blocks) - 1

    def add_blocks(self, dim: int, count: int) -> list[int]:
        return [self.add_block(dim) for _ in range(count)]

    def set_objective(self, block: int, c) -> None:
        c = np.asarray(c, dtype=complex).reshape(self.blocks[block], self.blocks[block])
        self.objective[block] = herm(c)

    def add_constraint(self, coeffs: Mapping[int, np.ndarray], rhs: float) -> int:
        self.constraints.append(Constraint(dict(coeffs), float(rhs)))
        return len(self.constraints) - 1

    def _term_coeff(self, term: Term, basis_elem: np.ndarray) -> np.ndarray:
        n = self.blocks[term.block]
        if term.matrix is None:
            if n != basis_elem.shape[0]:
                raise InvalidInput(
                    f"block {term.block} has dimension {n}, expression has {basis_elem.shape[0]}"
                )
            return term.scale * basis_elem
        if n != 1:
            raise InvalidInput(f"matrix-valued term needs a 1x1 block, block {term.block} has {n}")
        m = np.asarray(term.matrix)
        if m.shape != basis_elem.shape:
            raise InvalidInput(f"term matrix shape {m.shape} does not match {basis_elem.shape}")
        val = term.scale * np.trace(basis_elem @ m).real
        return np.array([[val]], dtype=complex)

    def matrix_equality_rows(self, terms: Sequence[Term], rhs: np.ndarray) -> list[Constraint]:
        """Rows of ``sum(terms) = rhs`` in the orthonormal Hermitian basis."""
        rhs = herm(np.asarray(rhs))
        d = rhs.shape[0]
        rows = []
        for bk in hermitian_basis(d):
            coeffs: dict[int, np.ndarray] = {}
            for t in terms:
                c = self._term_coeff(t, bk)
                coeffs[t.block] = coeffs[t.block] + c if t.block in coeffs else c
            rows.append(Constraint(coeffs, float(np.trace(bk @ rhs).real)))
        return rows

    def add_matrix_equality(self, terms: Sequence[Term], rhs) -> list[int]:
        rows = self.matrix_equality_rows(terms, rhs)
        start = len(self.constraints)
        self.constraints.extend(rows)
        return list(range(start, start + len(rows)))

    def add_inequality(self, lhs, rhs) -> InequalityFragment:
        frag = build_inequality(self, lhs, rhs)
        self.constraints.extend(frag.constraints)
        return frag

    def build(self) -> SdpProblem:
        objective = tuple(
            self.objective.get(b, np.zeros((n, n), dtype=complex)) for b, n in enumerate(self.blocks)
        )
        return SdpProblem(tuple(self.blocks), objective, tuple(self.constraints))


def _split_expr(expr) -> tuple[list[Term], np.ndarray | None]:
    """Split an affine expression (matrix, Term, or list of both) into terms and constant."""
    if isinstance(expr, Term):
        return [expr], None
    if isinstance(expr, np.ndarray):
        return [], expr
    terms, const = [], None
    for e in expr:
        if isinstance(e, Term):
            terms.append(e)
        else:
            e = np.asarray(e, dtype=complex)
            const = e if const is None else const + e
    return terms, const


def build_inequality(builder: SdpBuilder, lhs, rhs) -> InequalityFragment:
    """Encode ``lhs <= rhs`` (Loewner order) for affine matrix expressions.

    A fresh PSD slack block ``T`` is allocated with ``T = rhs - lhs`` imposed
    entrywise, except when the inequality already reads ``0 <= X_b`` for a
    single block variable, which is PSD by declaration. The new block is
    registered on ``builder`` but the rows are only returned; use
    :meth:`SdpBuilder.add_inequality` to also append them.
    """
    lterms, lconst = _split_expr(lhs)
    rterms, rconst = _split_expr(rhs)

    def is_zero(c):
        return c is None or not np.any(c)

    if not lterms and is_zero(lconst) and len(rterms) == 1 and is_zero(rconst):
        t = rterms[0]
        if t.matrix is None and t.scale > 0:
            return InequalityFragment(None, ())

    dims = set()
    for t in lterms + rterms:
        if t.matrix is None:
            dims.add(builder.blocks[t.block])
        else:
            dims.add(np.shape(t.matrix)[0])
    for c in (lconst, rconst):
        if c is not None:
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise InvalidInput(f"constant term must be square, got shape {c.shape}")
            dims.add(c.shape[0])
    if len(dims) != 1:
        raise InvalidInput(f"dimension mismatch in inequality: {sorted(dims)}")
    (d,) = dims

    slack = builder.add_block(d)
    # T + lhs_terms - rhs_terms = rconst - lconst
    terms = [Term(slack)] + lterms + [Term(t.block, -t.scale, t.matrix) for t in rterms]
    const = np.zeros((d, d), dtype=complex)
    if rconst is not None:
        const = const + rconst
    if lconst is not None:
        const = const - lconst
    rows = builder.matrix_equality_rows(terms, const)
    return InequalityFragment(slack, tuple(rows))


# --- solver -------------------------------------------------------------------


class _Group:
    """Blocks of equal dimension, stacked for batched linear algebra."""

    def __init__(self, n: int, idx: list[int], problem: SdpProblem, rows: np.ndarray):
        self.n = n
        self.idx = idx
        m = len(rows)
        self.A = np.zeros((len(idx), m, n, n), dtype=complex)
        for r, j in enumerate(rows):
            coeffs = problem.constraints[j].coeffs
            for k, b in enumerate(idx):
                a = coeffs.get(b)
                if a is not None:
                    self.A[k, r] = herm(a)
        self.C = np.array([herm(problem.objective[b]) for b in idx])
        # (m, nb*n*n) flattening used by the Schur complement product
        self.A_flat = self.A.transpose(1, 0, 2, 3).reshape(m, -1)


def _constraint_matrix(problem: SdpProblem) -> np.ndarray:
    offsets = np.cumsum([0] + [n * n for n in problem.blocks])
    g = np.zeros((problem.n_constraints, 2 * offsets[-1]))
    for j, con in enumerate(problem.constraints):
        for b, a in con.coeffs.items():
            a = herm(a)
            lo, hi = offsets[b], offsets[b + 1]
            g[j, lo:hi] = a.real.ravel()
            g[j, offsets[-1] + lo : offsets[-1] + hi] = a.imag.ravel()
    return g


def _reduce_rows(problem: SdpProblem, tol: float):
    """Pivoted QR on the constraint rows.

    Returns ``(kept, dropped, farkas)``; ``farkas`` is a multiplier vector
    proving inconsistency of dependent rows, or None.
    """
    m = problem.n_constraints
    if m == 0:
        return np.arange(0), (), None
    g = _constraint_matrix(problem)
    b = np.array([c.rhs for c in problem.constraints])
    _, r, piv = sla.qr(g.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0:
        rank = 0
    else:
        rank = int(np.sum(diag > 1e-10 * diag[0]))
    kept = np.sort(piv[:rank])
    dropped = tuple(int(j) for j in np.sort(piv[rank:]))
    if not dropped:
        return kept, (), None
    gk = g[kept]
    w = np.linalg.lstsq(gk.T, g.T, rcond=None)[0]  # g ~ w.T @ gk
    resid = b - w.T @ b[kept]
    j = int(np.argmax(np.abs(resid)))
    if abs(resid[j]) > tol * (1.0 + np.max(np.abs(b))):
        y = np.zeros(m)
        y[j] = 1.0
        y[kept] -= w[:, j]
        y *= np.sign(resid[j])
        return kept, dropped, y
    return kept, dropped, None


def _schur_solver(mat: np.ndarray):
    """Solver for the Schur complement system, with Jacobi scaling.

    Near a degenerate optimum the Schur matrix tends to a singular limit
    (non-unique multipliers). Cholesky is used while it is safe; beyond
    that a truncated eigendecomposition gives the minimum-norm solution on
    the numerically significant range, which keeps the primal residual
    under control where a factorization would amplify rounding error.
    """
    diag = np.sqrt(np.maximum(np.abs(np.diag(mat)), np.finfo(float).tiny))
    scaled = mat / diag[:, None] / diag[None, :]
    inner = None
    try:
        factor = sla.cho_factor(scaled, check_finite=False)
        rcond = np.min(np.abs(np.diag(factor[0]))) ** 2 / np.max(np.abs(np.diag(factor[0]))) ** 2
        if rcond > SCHUR_RCOND:

            def inner(r):
                return sla.cho_solve(factor, r, check_finite=False)

    except np.linalg.LinAlgError:
        pass
    if inner is None:
        w, v = np.linalg.eigh(scaled)
        keep = w > SCHUR_EIG_CUTOFF * max(w[-1], np.finfo(float).tiny)
        v, winv = v[:, keep], 1.0 / w[keep]

        def inner(r):
            return v @ (winv * (v.T @ r))

    def msolve(r):
        return inner(r / diag) / diag

    return msolve


def _step_length(x: list[np.ndarray], dx: list[np.ndarray]) -> float:
    """Largest alpha in (0, inf] with x + alpha dx PSD (x positive definite)."""
    lam = np.inf
    for xg, dxg in zip(x, dx):
        lchol = np.linalg.cholesky(xg)
        tmp = np.linalg.solve(lchol, dxg)
        w = np.linalg.solve(lchol, tmp.conj().swapaxes(-1, -2))
        w = herm(w)
        lmin = float(np.min(np.linalg.eigvalsh(w)))
        lam = min(lam, lmin)
    return np.inf if lam >= 0 else -1.0 / lam


def _psd_factor(a: np.ndarray) -> np.ndarray:
    """``F`` with ``F F^* = a`` for a stack of positive definite matrices."""
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(a)
        return v * np.sqrt(np.maximum(w, np.finfo(float).tiny))[..., None, :]


def _nt_scaling(x: np.ndarray, s: np.ndarray):
    """Nesterov-Todd scaling for a stack of blocks.

    Returns ``(W, G, G^-1, v)`` with ``W = G G^*``, ``W S W = X`` and
    ``G^-1 X G^-* = G^* S G = diag(v)``. Built from factors of ``X`` and
    ``S`` and one SVD, without inverting either matrix.
    """
    lx, ls = _psd_factor(x), _psd_factor(s)
    u, v, vh = np.linalg.svd(ls.conj().swapaxes(-1, -2) @ lx)
    v = np.maximum(v, np.finfo(float).tiny)
    rs = 1.0 / np.sqrt(v)
    gm = (lx @ vh.conj().swapaxes(-1, -2)) * rs[..., None, :]
    gm_inv = (rs[..., :, None] * u.conj().swapaxes(-1, -2)) @ ls.conj().swapaxes(-1, -2)
    w = _symm(gm @ gm.conj().swapaxes(-1, -2))
    return w, gm, gm_inv, v


def _symm(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().swapaxes(-1, -2)) / 2


def solve(
    problem: SdpProblem,
    tol_gap: float = TOL_GAP,
    max_iter: int = MAX_ITER,
    tol_feas: float = TOL_FEAS,
) -> SdpSolution:
    """Solve an :class:`SdpProblem` to a certified duality gap.

    Statuses:

    * ``Optimal``: primal/dual residuals (relative to ``1 + ||b||`` and
      ``1 + ||C||``) at most ``tol_feas`` and relative gap and
      complementarity at most ``tol_gap``.
    * ``PrimalInfeasible``: ``certificate`` is ``y`` with ``b . y = 1`` and
      ``-sum_j y_j A_j >= -tol_feas``.
    * ``DualInfeasible``: ``certificate`` is a list of PSD blocks ``X`` with
      ``Tr[C X] = -1`` and ``||A(X)|| <= tol_feas``.
    * ``NumericalLimit``: iteration budget or step stagnation; the best
      iterate is returned.
    """
    if tol_gap <= 0:
        raise InvalidInput("tol_gap must be positive")
    if max_iter < 1:
        raise InvalidInput("max_iter must be positive")
    m_all = problem.n_constraints
    b_all = np.array([c.rhs for c in problem.constraints], dtype=float)

    kept, dropped, farkas = _reduce_rows(problem, tol=max(tol_feas, 1e-9))
    if dropped:
        warnings.warn(
            f"dropped {len(dropped)} linearly dependent equality constraint(s)",
            RedundantConstraintWarning,
            stacklevel=2,
        )
    if farkas is not None:
        y = farkas / float(b_all @ farkas)
        return _infeasible(problem, Status.PRIMAL_INFEASIBLE, y, dropped)

    by_dim: dict[int, list[int]] = {}
    for bi, n in enumerate(problem.blocks):
        by_dim.setdefault(n, []).append(bi)
    groups = [_Group(n, idx, problem, kept) for n, idx in sorted(by_dim.items())]
    b = b_all[kept]
    m = len(b)
    n_total = sum(problem.blocks)

    def A_op(xs):
        out = np.zeros(m)
        for g, x in zip(groups, xs):
            out += np.einsum("bjac,bca->j", g.A, x).real
        return out

    def AT_op(y):
        return [np.einsum("j,bjac->bac", y, g.A) for g in groups]

    def inner(xs, ss):
        return float(sum(np.einsum("bac,bca->", x, s).real for x, s in zip(xs, ss)))

    def fro(xs):
        return float(np.sqrt(sum(np.sum(np.abs(x) ** 2) for x in xs)))

    norm_b = float(np.linalg.norm(b))
    if m:
        a_rows = np.concatenate([g.A_flat for g in groups], axis=1)
        gram = sla.cho_factor((a_rows.conj() @ a_rows.T).real, check_finite=False)
    norm_c = fro([g.C for g in groups])
    norm_a = max([float(np.max(np.linalg.norm(g.A, axis=(2, 3)))) for g in groups] + [0.0])

    # SDPT3-style starting point
    xs, ss = [], []
    for g in groups:
        n = g.n
        if m:
            a_norms = np.linalg.norm(g.A, axis=(2, 3))  # (nb, m)
            ratio = np.max((1.0 + np.abs(b)) / (1.0 + a_norms), axis=1)
        else:
            ratio = np.zeros(len(g.idx))
        xi = np.maximum(max(10.0, np.sqrt(n)), n * ratio)
        c_norms = np.linalg.norm(g.C, axis=(1, 2))
        eta = np.maximum(10.0, np.maximum(c_norms, norm_a)) * (1 + np.sqrt(n)) / np.sqrt(n)
        eye = np.eye(n, dtype=complex)
        xs.append(xi[:, None, None] * eye)
        ss.append(eta[:, None, None] * eye)
    y = np.zeros(m)

    best = None
    status = Status.NUMERICAL_LIMIT
    certificate = None
    stall = 0
    it = 0
    for it in range(1, max_iter + 1):
        rp = b - A_op(xs)
        aty = AT_op(y)
        rd = [g.C - a - s for g, a, s in zip(groups, aty, ss)]
        pobj = inner([g.C for g in groups], xs)
        dobj = float(b @ y)
        xs_dot = inner(xs, ss)
        mu = xs_dot / n_total
        pinf = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        dinf = fro(rd) / (1.0 + norm_c)
        scale = max(1.0, abs(pobj))
        relgap = abs(pobj - dobj) / scale
        merit = max(pinf / tol_feas, dinf / tol_feas, relgap / tol_gap, xs_dot / scale / tol_gap)
        if best is None or merit < best[0]:
            best = (merit, [x.copy() for x in xs], y.copy(), [s.copy() for s in ss], it)
        if pinf <= tol_feas and dinf <= tol_feas and relgap <= tol_gap and xs_dot <= tol_gap * scale:
            status = Status.OPTIMAL
            break

        # Farkas rays
        if m and dobj > 0:
            ybar = y / dobj
            z = AT_op(ybar)
            zmax = max(float(np.max(np.linalg.eigvalsh(zg))) for zg in z)
            if zmax <= tol_feas:
                status, certificate = Status.PRIMAL_INFEASIBLE, ybar
                break
        if pobj < 0:
            xbar = [x / -pobj for x in xs]
            if float(np.linalg.norm(A_op(xbar))) <= tol_feas:
                status, certificate = Status.DUAL_INFEASIBLE, xbar
                break

        try:
            scal = [_nt_scaling(x, s) for x, s in zip(xs, ss)]
            mat = np.zeros((m, m))
            for g, (w, _, _, _) in zip(groups, scal):
                u = w[:, None] @ g.A @ w[:, None]  # (nb, m, n, n)
                u_flat = u.swapaxes(-1, -2).transpose(1, 0, 2, 3).reshape(m, -1)
                mat += (g.A_flat @ u_flat.T).real
            mat = (mat + mat.T) / 2
            if not np.all(np.isfinite(mat)):
                break
            msolve = _schur_solver(mat) if m else None
            w_rd_w = [sc[0] @ r @ sc[0] for sc, r in zip(scal, rd)]

            def direction(target):
                """Solve A dx = rp, A^T dy + ds = rd, dx + W ds W = target."""
                dy = msolve(rp - A_op(target) + A_op(w_rd_w)) if m else np.zeros(0)
                for _ in range(REFINE_STEPS if m else 0):
                    # refine against the exact operator, not the formed Schur matrix
                    ds = [r - a for r, a in zip(rd, AT_op(dy))]
                    dx = [t - sc[0] @ d_ @ sc[0] for t, sc, d_ in zip(target, scal, ds)]
                    err = rp - A_op(dx)
                    if np.linalg.norm(err) <= 1e-15 * (1.0 + norm_b):
                        break
                    dy = dy + msolve(err)
                ds = [r - a for r, a in zip(rd, AT_op(dy))]
                dx = [_symm(t - sc[0] @ d_ @ sc[0]) for t, sc, d_ in zip(target, scal, ds)]
                if m:
                    # restore A(dx) = rp exactly through the fixed, well-conditioned Gram matrix
                    fix = AT_op(sla.cho_solve(gram, rp - A_op(dx), check_finite=False))
                    dx = [d_ + f for d_, f in zip(dx, fix)]
                return dx, dy, ds

            def complementarity_target(rhs_scaled):
                # in the NT frame X~ = S~ = diag(v); solve v_i t_ij + t_ij v_j = rhs_ij
                out = []
                for (_, gm, _, v), r in zip(scal, rhs_scaled):
                    t = r / (v[:, :, None] + v[:, None, :])
                    out.append(_symm(gm @ t @ gm.conj().swapaxes(-1, -2)))
                return out

            # predictor: affine-scaling target is -X
            dx_a, dy_a, ds_a = direction([-x for x in xs])
            ap = min(1.0, _step_length(xs, dx_a))
            ad = min(1.0, _step_length(ss, ds_a))
            mu_aff = inner([x + ap * d_ for x, d_ in zip(xs, dx_a)], [s + ad * d_ for s, d_ in zip(ss, ds_a)]) / n_total
            sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
            # corrector with the second-order Mehrotra term, formed in the scaled frame
            rhs_scaled = []
            for (_, gm, gm_inv, v), dxa, dsa in zip(scal, dx_a, ds_a):
                dxt = gm_inv @ dxa @ gm_inv.conj().swapaxes(-1, -2)
                dst = gm.conj().swapaxes(-1, -2) @ dsa @ gm
                eye = np.eye(v.shape[-1])[None]
                rhs_scaled.append(
                    2 * sigma * mu * eye - 2 * (v[:, :, None] ** 2) * eye - (dxt @ dst + dst @ dxt)
                )
            dx, dy, ds = direction(complementarity_target(rhs_scaled))
            gamma = 0.9 + 0.09 * min(ap, ad)
            ap = min(1.0, gamma * _step_length(xs, dx))
            ad = min(1.0, gamma * _step_length(ss, ds))
        except np.linalg.LinAlgError:
            break
        if not (np.isfinite(ap) and np.isfinite(ad)):
            break
        xs = [_symm(x + ap * d_) for x, d_ in zip(xs, dx)]
        y = y + ad * dy
        ss = [_symm(s + ad * d_) for s, d_ in zip(ss, ds)]
        if max(ap, ad) < 1e-8:
            stall += 1
            if stall >= 5:
                break
        else:
            stall = 0

    if status is Status.PRIMAL_INFEASIBLE:
        y_full = np.zeros(m_all)
        y_full[kept] = certificate
        return _infeasible(problem, status, y_full, dropped, iterations=it)
    if status is Status.DUAL_INFEASIBLE:
        blocks = _unstack(problem, groups, certificate)
        return _infeasible(problem, status, blocks, dropped, iterations=it)

    if status is not Status.OPTIMAL:
        _, xs, y, ss, _ = best
    rp = b - A_op(xs)
    rd = [g.C - a - s for g, a, s in zip(groups, AT_op(y), ss)]
    pobj = inner([g.C for g in groups], xs)
    dobj = float(b @ y)
    y_full = np.zeros(m_all)
    y_full[kept] = y
    return SdpSolution(
        status=status,
        primal_blocks=_unstack(problem, groups, xs),
        dual_multipliers=y_full,
        dual_slacks=_unstack(problem, groups, ss),
        primal_value=pobj,
        dual_value=dobj,
        gap=abs(pobj - dobj) / max(1.0, abs(pobj)),
        iterations=it,
        primal_residual=float(np.linalg.norm(rp)) / (1.0 + norm_b),
        dual_residual=fro(rd) / (1.0 + norm_c),
        dropped_constraints=dropped,
    )


def _unstack(problem: SdpProblem, groups: list[_Group], stacked) -> tuple[np.ndarray, ...]:
    out: list[np.ndarray | None] = [None] * len(problem.blocks)
    for g, arr in zip(groups, stacked):
        for k, bi in enumerate(g.idx):
            out[bi] = herm(arr[k])
    return tuple(out)


def _infeasible(problem, status, certificate, dropped, iterations=0) -> SdpSolution:
    nan = float("nan")
    zeros = tuple(np.zeros((n, n), dtype=complex) for n in problem.blocks)
    return SdpSolution(
        status=status,
        primal_blocks=zeros,
        dual_multipliers=np.zeros(problem.n_constraints),
        dual_slacks=zeros,
        primal_value=np.inf if status is Status.PRIMAL_INFEASIBLE else -np.inf,
        dual_value=np.inf if status is Status.PRIMAL_INFEASIBLE else -np.inf,
        gap=nan,
        iterations=iterations,
        primal_residual=nan,
        dual_residual=nan,
        certificate=certificate,
        dropped_constraints=dropped,
    )


def dual_operator(problem: SdpProblem, y: np.ndarray) -> tuple[np.ndarray, ...]:
    """``sum_j y_j A_jb`` for every block."""
    out = [np.zeros((n, n), dtype=complex) for n in problem.blocks]
    for yj, con in zip(y, problem.constraints):
        if yj:
            for bi, a in con.coeffs.items():
                out[bi] = out[bi] + yj * herm(a)
    return tuple(out)


def primal_operator(problem: SdpProblem, xs: Sequence[np.ndarray]) -> np.ndarray:
    """``(sum_b Tr[A_jb X_b])_j``."""
    return np.array(
        [sum(np.trace(herm(a) @ xs[bi]).real for bi, a in con.coeffs.items()) for con in problem.constraints]
    )
