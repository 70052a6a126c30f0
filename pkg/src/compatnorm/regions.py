"""Bounds on the compatibility region Gamma(g, d) and phase-diagram data.

``Gamma(g, d)`` is the set of noise vectors ``s`` in ``[0, 1]^g`` such that
every ``g``-tuple of ``d``-dimensional dichotomic measurements becomes
compatible after mixing measurement ``i`` with white noise at visibility
``s_i``. Known facts used here:

* ``QC_g = {s : sum s_i^2 <= 1}`` is always contained in ``Gamma(g, d)``
  and equals it when ``d >= 2^ceil((g-1)/2)``, for ``g = 2`` (any ``d >= 2``)
  and for ``(g, d) = (3, 2)``;
* the simplex ``{s : sum s_i <= 1}`` is contained in ``Gamma(g, d)``;
* ``tau*(d) (1, ..., 1)`` lies in ``Gamma(g, d)`` for every ``g``, with
  ``tau*(d) = 4^-n binom(2n, n)``, ``n = floor(d / 2)``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput
from .hermit import PAULIS, haar_unitary, random_instance
from .measure import EffectTuple, add_white_noise, is_compatible, sharp_effects
from .norms import G_MAX

COUNTEREXAMPLE_MARGIN = 1e-6


def _unit_box(s) -> np.ndarray:
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.size == 0:
        raise InvalidInput("empty noise vector")
    if np.any(~np.isfinite(s)) or np.any(s < 0) or np.any(s > 1):
        raise InvalidInput(f"entries must lie in [0, 1], got {s.tolist()}")
    return s


def qc_contains(s, tol: float = 1e-12) -> bool:
    """``sum s_i^2 <= 1``."""
    s = _unit_box(s)
    return bool(np.sum(s**2) <= 1.0 + tol)


def simplex_contains(s, tol: float = 1e-12) -> bool:
    """``sum s_i <= 1``."""
    s = _unit_box(s)
    return bool(np.sum(s) <= 1.0 + tol)


class TauStar(NamedTuple):
    exact: Fraction
    value: float
    asymptotic: float


def tau_star(d: int) -> TauStar:
    """``tau*(d) = 4^-n binom(2n, n)`` with ``n = floor(d/2)``, plus ``sqrt(2 / (pi d))``."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidInput(f"d must be a positive integer, got {d!r}")
    n = int(d) // 2
    exact = Fraction(math.comb(2 * n, n), 4**n)
    return TauStar(exact, float(exact), math.sqrt(2.0 / (math.pi * d)))


def qc_exact_dimension(g: int) -> int:
    """Smallest ``d`` from which ``Gamma(g, d) = QC_g`` is guaranteed: ``2^ceil((g-1)/2)``."""
    return 2 ** math.ceil((g - 1) / 2)


class Region(str, Enum):
    EUCLIDEAN_BALL = "EuclideanBall"  # QC_g
    UNIT_CUBE = "UnitCube"  # [0, 1]^g


def known_gamma(g: int, d: int) -> Region | None:
    """Exact ``Gamma(g, d)`` where known, else ``None``.

    ``d = 1`` is the commutative case: every tuple is compatible and the
    region is the whole cube.
    """
    if g < 1 or d < 1:
        raise InvalidInput("g and d must be positive")
    if d == 1:
        return Region.UNIT_CUBE if g > 1 else Region.EUCLIDEAN_BALL
    if g == 2 or (g, d) == (3, 2) or d >= qc_exact_dimension(g):
        return Region.EUCLIDEAN_BALL
    return None


class PhaseClass(str, Enum):
    QC_EXACT = "QcExact"
    QC_STRICTLY_CONTAINED = "QcStrictlyContained"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class PhaseCell:
    g: int
    d: int
    classification: PhaseClass
    tau_star: float
    g_tau_sq: float  # g * tau*(d)^2; > 1 means tau*(d)(1,...,1) lies outside QC_g

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "d": self.d,
            "classification": self.classification.value,
            "tau_star": self.tau_star,
            "g_tau_sq": self.g_tau_sq,
        }


def phase_cell(g: int, d: int) -> PhaseCell:
    ts = tau_star(d).exact
    g_tau_sq = g * ts * ts
    if known_gamma(g, d) is Region.EUCLIDEAN_BALL:
        cls = PhaseClass.QC_EXACT
    elif g_tau_sq > 1:
        cls = PhaseClass.QC_STRICTLY_CONTAINED
    else:
        cls = PhaseClass.UNRESOLVED
    return PhaseCell(g, d, cls, float(ts), float(g_tau_sq))


def phase_diagram(g_max: int, d_max: int) -> list[PhaseCell]:
    """Classify every ``(g, d)`` with ``1 <= g <= g_max``, ``1 <= d <= d_max`` (row-major in g)."""
    if g_max < 1 or d_max < 1:
        raise InvalidInput("g_max and d_max must be >= 1")
    return [phase_cell(g, d) for g in range(1, g_max + 1) for d in range(1, d_max + 1)]


def phase_diagram_csv(cells: Sequence[PhaseCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g", "d", "classification", "tau_star", "g_tau_sq"])
    for c in cells:
        w.writerow([c.g, c.d, c.classification.value, f"{c.tau_star:.12g}", f"{c.g_tau_sq:.12g}"])
    return buf.getvalue()


# --- probing Gamma by sampling ------------------------------------------------


def anticommuting_family(m: int) -> np.ndarray:
    """``2m + 1`` pairwise anticommuting Hermitian unitaries on ``(C^2)^(x)m`` (Jordan-Wigner)."""
    sx, sy, sz = PAULIS
    eye = np.eye(2)

    def kron(ops):
        out = np.ones((1, 1), dtype=complex)
        for o in ops:
            out = np.kron(out, o)
        return out

    fam = []
    for k in range(m):
        for p in (sx, sy):
            fam.append(kron([sz] * k + [p] + [eye] * (m - k - 1)))
    fam.append(kron([sz] * m))
    return np.array(fam)


def _sample_tuple(g: int, d: int, index: int, rng: np.random.Generator) -> EffectTuple:
    """Sample ``index`` of the probe sequence.

    Index 0 is the exact anticommuting construction (Pauli pair/triple for
    qubits), rotated by a random unitary for ``index > 0`` on even steps;
    odd steps draw near-orthogonal Bloch vectors (``d = 2``) or random
    rank-``d/2`` projections, and every fourth step a random unsharp tuple.
    """
    m = max(1, int(math.floor(math.log2(d)))) if d >= 2 else 0
    if d >= 2 and (index % 2 == 0) and g <= 2 * m + 1:
        fam = anticommuting_family(m)[:g]
        a = np.zeros((g, d, d), dtype=complex)
        a[:, : 2**m, : 2**m] = fam
        if index > 0:
            u = haar_unitary(d, rng)
            a = u[None] @ a @ u.conj().T[None]
        return EffectTuple((a + np.eye(d)[None]) / 2)
    if index % 4 == 3:
        return EffectTuple(np.array([random_instance("effect", d, rng) for _ in range(g)]))
    if d == 2:
        v = rng.standard_normal((g, 3))
        if g <= 3:
            q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
            v = q[:g] + 0.1 * v
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return sharp_effects(v)
    effects = []
    for _ in range(g):
        u = haar_unitary(d, rng)
        diag = np.zeros(d)
        diag[: max(1, d // 2)] = 1.0
        effects.append((u * diag) @ u.conj().T)
    return EffectTuple(np.array(effects))


class ProbeResult(NamedTuple):
    counterexample: EffectTuple | None
    norm: float  # largest compatibility norm seen among noisy tuples
    samples: int

    @property
    def found(self) -> bool:
        return self.counterexample is not None

    @property
    def verdict(self) -> str:
        return "CounterexampleFound" if self.found else "NoCounterexampleFound"

    @property
    def note(self) -> str:
        if self.found:
            return "s is not in Gamma(g, d): the noisy tuple is incompatible"
        return "no counterexample among the samples; this does not prove s is in Gamma(g, d)"


def gamma_probe(
    g: int,
    d: int,
    s,
    n_samples: int,
    seed: int,
    margin: float = COUNTEREXAMPLE_MARGIN,
    workers: int = 1,
    g_max: int = G_MAX,
) -> ProbeResult:
    """Search for an effect tuple that stays incompatible after noise ``s``.

    A counterexample requires compatibility norm ``> 1 + margin``, well
    above solver accuracy, and is a proof that ``s`` lies outside
    ``Gamma(g, d)``. Each sample draws from its own child seed, so results
    depend only on ``seed`` and not on ``workers``.
    """
    s = _unit_box(s)
    if s.shape != (g,):
        raise InvalidInput(f"noise vector must have length {g}")
    if n_samples < 1:
        raise InvalidInput("n_samples must be >= 1")
    children = np.random.SeedSequence(seed).spawn(n_samples)

    def run(k: int):
        e = _sample_tuple(g, d, k, np.random.default_rng(children[k]))
        noisy = add_white_noise(e, s)
        return e, is_compatible(noisy, g_max=g_max).value

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = ex.map(run, range(n_samples))
            return _first_counterexample(results, margin, n_samples)
    return _first_counterexample(map(run, range(n_samples)), margin, n_samples)


def _first_counterexample(results, margin: float, n_samples: int) -> ProbeResult:
    worst = -np.inf
    for e, value in results:
        worst = max(worst, value)
        if value > 1.0 + margin:
            return ProbeResult(e, value, n_samples)
    return ProbeResult(None, float(worst), n_samples)


def qc_boundary_point(g: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform-direction point of ``[0, 1]^g`` with ``||s||_2 = 1``."""
    v = np.abs(rng.standard_normal(g))
    return v / np.linalg.norm(v)

