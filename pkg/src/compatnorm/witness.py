"""Effect witnesses, incompatibility witnesses and their construction."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput
from .hermit import herm, positive_part_projector, psd_pinv_sqrt, psd_sqrt
from .measure import EffectTuple
from .norms import G_MAX, ObservableTuple, compat_dual_norm, inj_norm_l1, proj_norm_l1

CLASSIFY_TOL = 1e-7


class WitnessKind(str, Enum):
    EFFECT = "EffectWitness"
    INCOMPATIBILITY = "IncompatibilityWitness"
    STRICT = "StrictIncompatibilityWitness"
    NOT_A_WITNESS = "NotAWitness"


@dataclass(frozen=True)
class WitnessClass:
    """Classification of a tuple by its ``l1 (x)_pi S1`` and ``c*`` norms.

    ``kind`` is ``EffectWitness`` strictly inside the effect-witness ball,
    ``StrictIncompatibilityWitness`` in the incompatibility-witness ball but
    strictly outside the effect-witness ball, and ``IncompatibilityWitness``
    when it lies in the incompatibility-witness ball with ``proj_l1`` inside
    the tolerance band around one (strictness undecided).
    """

    kind: WitnessKind
    proj_l1: float
    c_star: float
    borderline: bool

    @property
    def in_incompatibility_ball(self) -> bool:
        return self.kind is not WitnessKind.NOT_A_WITNESS

    def to_json(self) -> dict:
        return {
            "class": self.kind.value,
            "proj_l1": self.proj_l1,
            "c_star": self.c_star,
            "borderline": self.borderline,
        }


def classify(phi: ObservableTuple, tol: float = CLASSIFY_TOL, g_max: int = G_MAX) -> WitnessClass:
    """Place ``phi`` relative to the effect-witness and incompatibility-witness balls.

    The zero tuple witnesses nothing and is reported as ``NotAWitness``
    with ``borderline`` set.
    """
    if phi.is_zero():
        return WitnessClass(WitnessKind.NOT_A_WITNESS, 0.0, 0.0, True)
    p = proj_norm_l1(phi)
    c = compat_dual_norm(phi, g_max=g_max).value
    c_border = abs(c - 1.0) <= tol
    p_border = abs(p - 1.0) <= tol
    if c > 1.0 + tol:
        kind = WitnessKind.NOT_A_WITNESS
    elif p > 1.0 + tol:
        kind = WitnessKind.STRICT
    elif p_border:
        kind = WitnessKind.INCOMPATIBILITY
    else:
        kind = WitnessKind.EFFECT
    return WitnessClass(kind, p, c, c_border or p_border)


def witness_from_pair(x: ObservableTuple, rho: np.ndarray, tol: float = 1e-9) -> ObservableTuple:
    """``phi_i = rho^1/2 X_i rho^1/2`` for ``X`` in the ``W^max(B_l1)`` ball.

    ``rho`` itself certifies ``||phi||_c* <= Tr rho``, because
    ``rho - sum_i eps_i phi_i = rho^1/2 (I - sum_i eps_i X_i) rho^1/2``.
    """
    rho = np.asarray(rho)
    if rho.shape != (x.d, x.d):
        raise InvalidInput(f"state has shape {rho.shape}, expected {(x.d, x.d)}")
    n = inj_norm_l1(x)
    if n > 1.0 + tol:
        raise InvalidInput(f"X must satisfy sum_i eps_i X_i <= I for all signs (norm {n:.6g} > 1)")
    r = psd_sqrt(rho)
    return ObservableTuple(herm(r[None] @ x.components @ r[None]))


class Reconstruction(NamedTuple):
    x: ObservableTuple
    error: float
    inj_norm: float


def reconstruct_pair(phi: ObservableTuple, rho: np.ndarray, rtol: float = 1e-10) -> Reconstruction:
    """Invert :func:`witness_from_pair` on the support of ``rho``.

    ``X_i = rho^-1/2 phi_i rho^-1/2`` restricted to ``supp(rho)`` and zero
    on the kernel. ``error`` is the max-entry deviation of the re-sandwiched
    tuple from ``phi``; ``inj_norm`` certifies membership of ``X`` in the
    ``W^max(B_l1)`` ball.
    """
    inv_root, _ = psd_pinv_sqrt(rho, rtol=rtol)
    x = ObservableTuple(herm(inv_root[None] @ phi.components @ inv_root[None]))
    root = psd_sqrt(rho)
    back = herm(root[None] @ x.components @ root[None])
    err = float(np.max(np.abs(back - phi.components)))
    return Reconstruction(x, err, inj_norm_l1(x))


class Violation(NamedTuple):
    value: float
    maximizer: EffectTuple


def max_violation(phi: ObservableTuple) -> Violation:
    """``max <phi, 2E - I>`` over all effect tuples ``E``.

    The maximum separates over components: ``E_i`` is the projector onto
    the non-negative eigenspace of ``phi_i`` and the value is
    ``sum_i ||phi_i||_1``.
    """
    effects = np.array([positive_part_projector(c) for c in phi])
    return Violation(proj_norm_l1(phi), EffectTuple(effects))
