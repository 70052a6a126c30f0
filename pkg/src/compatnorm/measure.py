"""Dichotomic and general POVMs, compatibility decisions and noise robustness."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput, NotAnEffectTuple, SolverError, TooLarge
from .hermit import PAULIS, PSD_RTOL, herm, hermitian, random_instance
from .norms import (
    G_MAX,
    ObservableTuple,
    WitnessCertificate,
    compat_norm,
    sign_vectors,
)
from .sdp import SdpBuilder, Status, Term, solve

BOUNDARY_TOL = 1e-7
BISECTION_TOL = 1e-5
MAX_JOINT_OUTCOMES = 10_000


def _effect_violation(e: np.ndarray) -> float | None:
    """Offending eigenvalue of ``e`` if it is not in [0, I] within tolerance."""
    w = np.linalg.eigvalsh(herm(e))
    tol = PSD_RTOL * max(1.0, abs(w[0]), abs(w[-1]))
    if w[0] < -tol:
        return float(w[0])
    if w[-1] > 1.0 + tol:
        return float(w[-1])
    return None


@dataclass(frozen=True, eq=False)
class EffectTuple:
    """``g`` effects ``0 <= E_i <= I`` of dimension ``d``, shape ``(g, d, d)``."""

    effects: np.ndarray

    def __post_init__(self):
        e = np.array(self.effects, dtype=complex)
        if e.ndim != 3 or e.shape[1] != e.shape[2] or e.shape[0] < 1 or e.shape[1] < 1:
            raise InvalidInput(f"expected effects of shape (g, d, d), got {e.shape}")
        e = herm(e)
        for i, ei in enumerate(e):
            bad = _effect_violation(ei)
            if bad is not None:
                raise NotAnEffectTuple(i, bad)
        e.setflags(write=False)
        object.__setattr__(self, "effects", e)

    @classmethod
    def of(cls, matrices: Sequence) -> "EffectTuple":
        return cls(np.array([hermitian(m) for m in matrices]))

    @property
    def g(self) -> int:
        return self.effects.shape[0]

    @property
    def d(self) -> int:
        return self.effects.shape[1]

    def __getitem__(self, i) -> np.ndarray:
        return self.effects[i]

    def to_povms(self) -> "GeneralPovmFamily":
        eye = np.eye(self.d)
        return GeneralPovmFamily(tuple(np.array([e, eye - e]) for e in self.effects))


@dataclass(frozen=True, eq=False)
class GeneralPovmFamily:
    """``g`` POVMs; ``povms[i]`` has shape ``(k_i, d, d)`` and sums to the identity."""

    povms: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.povms:
            raise InvalidInput("need at least one POVM")
        out = []
        d = None
        for i, p in enumerate(self.povms):
            p = herm(np.array(p, dtype=complex))
            if p.ndim != 3 or p.shape[1] != p.shape[2] or p.shape[0] < 1:
                raise InvalidInput(f"POVM {i} must have shape (k, d, d), got {p.shape}")
            d = p.shape[1] if d is None else d
            if p.shape[1] != d:
                raise InvalidInput(f"POVM {i} has dimension {p.shape[1]}, expected {d}")
            for j, e in enumerate(p):
                w = np.linalg.eigvalsh(e)
                if w[0] < -PSD_RTOL * max(1.0, abs(w[-1])):
                    raise InvalidInput(f"POVM {i} effect {j} is not PSD (eigenvalue {w[0]:.3g})")
            err = np.max(np.abs(p.sum(axis=0) - np.eye(d)))
            if err > 1e-9:
                raise InvalidInput(f"POVM {i} does not sum to the identity (error {err:.3g})")
            p.setflags(write=False)
            out.append(p)
        object.__setattr__(self, "povms", tuple(out))

    @property
    def g(self) -> int:
        return len(self.povms)

    @property
    def d(self) -> int:
        return self.povms[0].shape[1]

    @property
    def outcome_counts(self) -> tuple[int, ...]:
        return tuple(p.shape[0] for p in self.povms)


@dataclass(frozen=True)
class PostProcessing:
    """``probs[i, l, v] = p(outcome v of measurement i | joint outcome l)``."""

    probs: np.ndarray

    def check(self, atol: float = 1e-12) -> bool:
        p = self.probs
        return bool(np.all(p >= -atol) and np.all(p <= 1 + atol) and np.allclose(p.sum(axis=2), 1, atol=atol))


@dataclass(frozen=True)
class JointPovm:
    """Joint measurement with labelled outcomes.

    For dichotomic families the labels are vectors ``z`` in ``{+1, -1}^g``
    plus possibly the all-zero label for the completing operator; the
    classical post-processing is ``p(+-|i, z) = (1 +- z_i) / 2``. For
    general families the labels are outcome multi-indices and the
    post-processing is the deterministic read-out of coordinate ``i``.
    """

    labels: tuple[tuple[int, ...], ...]
    operators: np.ndarray  # (L, d, d)
    kind: str = "signs"  # or "outcomes"

    def post_processing(self, outcome_counts: Sequence[int] | None = None) -> PostProcessing:
        labels = np.array(self.labels, dtype=float)
        g = labels.shape[1]
        if self.kind == "signs":
            plus = (1.0 + labels.T) / 2.0  # (g, L)
            return PostProcessing(np.stack([plus, 1.0 - plus], axis=2))
        k = max(outcome_counts) if outcome_counts else int(labels.max()) + 1
        probs = np.zeros((g, len(self.labels), k))
        for l, lab in enumerate(self.labels):
            for i, v in enumerate(lab):
                probs[i, l, v] = 1.0
        return PostProcessing(probs)

    def marginals(self, outcome_counts: Sequence[int] | None = None) -> list[np.ndarray]:
        """``E^{(i)}_v = sum_l p(v|i,l) R_l``, one ``(k_i, d, d)`` array per ``i``."""
        probs = self.post_processing(outcome_counts).probs
        out = []
        for i in range(probs.shape[0]):
            k = outcome_counts[i] if outcome_counts else probs.shape[2]
            out.append(np.einsum("lv,lab->vab", probs[i, :, :k], self.operators))
        return out

    def effects(self) -> np.ndarray:
        """Marginal ``+1`` effects of a dichotomic joint measurement."""
        return np.array([m[0] for m in self.marginals()])

    def sum_error(self) -> float:
        d = self.operators.shape[1]
        return float(np.max(np.abs(self.operators.sum(axis=0) - np.eye(d))))

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.operators)))


def to_tensor(e: EffectTuple) -> ObservableTuple:
    """``A_i = 2 E_i - I``."""
    return ObservableTuple(2.0 * e.effects - np.eye(e.d)[None])


def from_tensor(a: ObservableTuple) -> EffectTuple:
    """``E_i = (A_i + I) / 2``; raises :class:`NotAnEffectTuple` unless ``-I <= A_i <= I``."""
    for i, ai in enumerate(a):
        w = np.linalg.eigvalsh(herm(ai))
        tol = PSD_RTOL * max(1.0, abs(w[0]), abs(w[-1]))
        if w[0] < -1.0 - tol:
            raise NotAnEffectTuple(i, float(w[0]))
        if w[-1] > 1.0 + tol:
            raise NotAnEffectTuple(i, float(w[-1]))
    return EffectTuple((a.components + np.eye(a.d)[None]) / 2.0)


class CompatibilityResult(NamedTuple):
    verdict: bool
    margin: float
    value: float
    joint: JointPovm | None
    post: PostProcessing | None
    witness: WitnessCertificate | None


def is_compatible(e: EffectTuple, tol: float = BOUNDARY_TOL, g_max: int = G_MAX) -> CompatibilityResult:
    """Decide joint measurability of dichotomic effects through ``||2E - I||_c <= 1``.

    A compatible verdict carries the joint POVM ``{K_l}`` read off the
    optimal decomposition, completed by ``K_0 = I - sum_l K_l`` under the
    all-zero label. An incompatible verdict carries the dual witness, whose
    pairing with ``2E - I`` exceeds one.
    """
    a = to_tensor(e)
    res = compat_norm(a, g_max=g_max)
    value = res.value
    margin = 1.0 - value
    if value <= 1.0 + tol:
        signs = sign_vectors(e.g).astype(int)
        blocks = res.primal.blocks
        k0 = herm(np.eye(e.d) - blocks.sum(axis=0))
        labels = tuple(tuple(int(v) for v in s) for s in signs) + ((0,) * e.g,)
        joint = JointPovm(labels, np.concatenate([blocks, k0[None]]), kind="signs")
        return CompatibilityResult(True, margin, value, joint, joint.post_processing(), None)
    return CompatibilityResult(False, margin, value, None, None, res.dual)


class MarginalFormResult(NamedTuple):
    verdict: bool
    visibility: float
    joint: JointPovm | None


def _check_size(counts: Sequence[int]) -> int:
    total = math.prod(counts)
    if total > MAX_JOINT_OUTCOMES:
        raise TooLarge(f"joint outcome space has {total} > {MAX_JOINT_OUTCOMES} outcomes")
    return total


def marginal_form_visibility(f: GeneralPovmFamily) -> tuple[float, JointPovm]:
    """Largest ``t <= 1`` such that the uniformly noisy family has a joint POVM.

    Variables are PSD ``R_j`` indexed by outcome multi-indices ``j`` with::

        sum_{j : j_i = v} R_j = t E^{(i)}_v + (1 - t) I / k_i    (v < k_i - 1)
        sum_j R_j = I

    The last outcome of each POVM is implied by normalization. ``t = 0``
    admits a strictly positive solution, so the program is strictly
    feasible for every input.
    """
    counts = f.outcome_counts
    _check_size(counts)
    d = f.d
    eye = np.eye(d, dtype=complex)
    labels = tuple(itertools.product(*(range(k) for k in counts)))

    bld = SdpBuilder()
    rs = bld.add_blocks(d, len(labels))
    t = bld.add_block(1)
    bld.set_objective(t, [[-1.0]])
    for i, (k, povm) in enumerate(zip(counts, f.povms)):
        for v in range(k - 1):
            terms = [Term(r, 1.0) for r, lab in zip(rs, labels) if lab[i] == v]
            terms.append(Term(t, -1.0, povm[v] - eye / k))
            bld.add_matrix_equality(terms, eye / k)
    bld.add_matrix_equality([Term(r) for r in rs], eye)
    u = bld.add_block(1)
    bld.add_constraint({t: np.ones((1, 1)), u: np.ones((1, 1))}, 1.0)
    sol = solve(bld.build())
    if sol.status is not Status.OPTIMAL:
        raise SolverError(f"marginal-form SDP returned {sol.status.value}", solution=sol)
    vis = float(sol.primal_blocks[t][0, 0].real)
    ops = np.array([sol.primal_blocks[r] for r in rs])
    return vis, JointPovm(labels, ops, kind="outcomes")


def is_compatible_marginal_form(f: GeneralPovmFamily, tol: float = BOUNDARY_TOL) -> MarginalFormResult:
    """Joint measurability straight from the definition (marginals of one POVM).

    Independent of the norm route: works for any outcome counts and never
    forms the tensor ``2E - I``. The verdict is positive when the program
    reaches full visibility ``t >= 1 - tol``.
    """
    if isinstance(f, EffectTuple):
        f = f.to_povms()
    vis, joint = marginal_form_visibility(f)
    if vis >= 1.0 - tol:
        return MarginalFormResult(True, vis, joint)
    return MarginalFormResult(False, vis, None)


def _noise_vector(s, g: int) -> np.ndarray:
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape != (g,):
        raise InvalidInput(f"noise vector must have length {g}, got {s.shape[0]}")
    if np.any(~np.isfinite(s)) or np.any(s < 0) or np.any(s > 1):
        raise InvalidInput(f"noise parameters must lie in [0, 1], got {s.tolist()}")
    return s


def add_white_noise(e: EffectTuple, s) -> EffectTuple:
    """``E'_i = s_i E_i + (1 - s_i) I / 2``."""
    s = _noise_vector(s, e.g)
    eye = np.eye(e.d)[None]
    return EffectTuple(s[:, None, None] * e.effects + (1 - s)[:, None, None] * eye / 2)


class RobustnessResult(NamedTuple):
    threshold: float
    steps: int
    upper: float


def robustness(
    e: EffectTuple,
    direction,
    tol: float = BISECTION_TOL,
    g_max: int = G_MAX,
    boundary_tol: float = BOUNDARY_TOL,
) -> RobustnessResult:
    """Largest ``t`` with ``add_white_noise(e, t * direction)`` compatible, by bisection.

    The search runs over ``[0, 1 / max(direction)]`` so that every probe
    stays in ``[0, 1]^g``. Noisy tuples map to ``t * direction * A``
    componentwise, and the compatible set is convex and contains 0, so the
    predicate is monotone in ``t``.
    """
    direction = _noise_vector(direction, e.g)
    if not np.any(direction > 0):
        raise InvalidInput("direction must be nonzero")
    a = to_tensor(e) * direction
    hi_t = 1.0 / float(direction.max())

    def compatible(t: float) -> bool:
        return compat_norm(a * t, g_max=g_max).value <= 1.0 + boundary_tol

    if compatible(hi_t):
        return RobustnessResult(hi_t, 1, hi_t)
    lo, hi = 0.0, hi_t
    steps = 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        steps += 1
        if compatible(mid):
            lo = mid
        else:
            hi = mid
    return RobustnessResult(0.5 * (lo + hi), steps, hi_t)


def embed(e: EffectTuple, d: int) -> EffectTuple:
    """Zero-pad effects into dimension ``d >= e.d``."""
    if d < e.d:
        raise InvalidInput(f"cannot embed dimension {e.d} into {d}")
    out = np.zeros((e.g, d, d), dtype=complex)
    out[:, : e.d, : e.d] = e.effects
    return EffectTuple(out)


def sharp_effects(bloch_vectors) -> EffectTuple:
    """Qubit effects ``(I + a . sigma) / 2`` for Bloch vectors ``a`` with ``|a| <= 1``."""
    a = np.atleast_2d(np.asarray(bloch_vectors, dtype=float))
    sig = np.array(PAULIS)
    return EffectTuple((np.eye(2)[None] + np.einsum("ik,kab->iab", a, sig)) / 2)


def random_effect_tuple(g: int, d: int, seed) -> EffectTuple:
    rng = np.random.default_rng(seed)
    return EffectTuple(np.array([random_instance("effect", d, rng) for _ in range(g)]))
