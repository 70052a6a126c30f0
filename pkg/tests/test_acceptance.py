"""Acceptance gate: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
under output capture) or directly with ``python3 -m tests.test_acceptance``.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from compatnorm.errors import SolverError
from compatnorm.hermit import SX, SY, SZ, haar_unitary, random_instance
from compatnorm.measure import (
    EffectTuple,
    add_white_noise,
    embed,
    is_compatible,
    is_compatible_marginal_form,
    random_effect_tuple,
    robustness,
    to_tensor,
)
from compatnorm.norms import (
    ObservableTuple,
    compat_dual_norm,
    compat_norm,
    inj_norm_l1,
    inj_norm_linf,
    wit_norm,
    wit_norm_sample_lb,
)
from compatnorm.regions import qc_boundary_point, tau_star
from compatnorm.witness import WitnessKind, classify, witness_from_pair

INV_SQRT2 = 1 / math.sqrt(2)
MASTER_SEED = 20240601


@pytest.fixture
def report(capsys):
    """Print one pass/fail line, bypassing output capture."""

    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {detail}")

    return emit


def pauli_effects(*ops) -> EffectTuple:
    return EffectTuple.of([(np.eye(2) + p) / 2 for p in ops])


def random_projections(g: int, d: int, rng) -> EffectTuple:
    """Sharp effects: projections of random rank onto Haar-random subspaces."""
    effects = []
    for _ in range(g):
        u = haar_unitary(d, rng)
        r = int(rng.integers(1, d)) if d > 1 else 1
        effects.append(u[:, :r] @ u[:, :r].conj().T)
    return EffectTuple(np.array(effects))


def mixed_effects(k: int, g: int, d: int, rng) -> EffectTuple:
    """Alternate unsharp random effects and sharp ones (which are mostly incompatible)."""
    return random_effect_tuple(g, d, rng) if k % 2 == 0 else random_projections(g, d, rng)


@lru_cache(maxsize=None)
def shared_instances():
    """100 seeded effect tuples with g in {2, 3}, d in {2, 3, 4}, and their norm solves."""
    children = np.random.SeedSequence(MASTER_SEED).spawn(100)
    out = []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        g, d = 2 + (k // 2) % 2, 2 + (k // 4) % 3
        e = mixed_effects(k, g, d, rng)
        try:
            res = compat_norm(to_tensor(e))
        except SolverError as exc:
            res = exc
        out.append((e, res))
    return out


def test_criterion_01_gamma_2d(report):
    pair = pauli_effects(SX, SZ)
    details, ok = [], True
    for d in (2, 3):
        e = pair if d == 2 else embed(pair, 3)
        t0 = time.perf_counter()
        thr = robustness(e, (1, 1)).threshold
        dt = time.perf_counter() - t0
        good = abs(thr - INV_SQRT2) <= 1e-4 and dt < 5
        ok &= good
        details.append(f"d={d} t*={thr:.6f} ({dt:.2f}s)")
    report(1, ok, f"robustness along (1,1) = 1/sqrt2 within 1e-4, <5s each: {'; '.join(details)}")
    assert ok


def test_criterion_02_gamma_32(report):
    triple = pauli_effects(SX, SY, SZ)
    t0 = time.perf_counter()
    a = robustness(triple, (1, 1, 1)).threshold
    b = robustness(triple, (1, 1, 0)).threshold
    dt = time.perf_counter() - t0
    ok = abs(a - 1 / math.sqrt(3)) <= 1e-4 and abs(b - INV_SQRT2) <= 1e-4 and dt < 10
    report(2, ok, f"Pauli triple (1,1,1) -> {a:.6f}, (1,1,0) -> {b:.6f} ({dt:.2f}s, limit 10s)")
    assert ok


def test_criterion_03_tau_star(report):
    table = {d: tau_star(d).exact for d in (2, 3, 4, 5)}
    expected = {2: Fraction(1, 2), 3: Fraction(1, 2), 4: Fraction(3, 8), 5: Fraction(3, 8)}
    t100 = tau_star(100)
    rel = abs(t100.value - math.sqrt(2 / (100 * math.pi))) / t100.value
    ok = table == expected and isinstance(table[2], Fraction) and rel < 0.05
    report(3, ok, f"tau* table {[str(table[d]) for d in (2, 3, 4, 5)]}, asymptotic rel. error at d=100 {rel:.4f}")
    assert ok


def test_criterion_04_strong_duality(report):
    worst, limits = 0.0, 0
    for e, res in shared_instances():
        if isinstance(res, SolverError):
            limits += 1
            continue
        rel = abs(res.value - res.dual.pairing(to_tensor(e))) / max(1.0, abs(res.value))
        worst = max(worst, rel)
    ok = worst <= 1e-6 and limits == 0
    report(4, ok, f"100 instances: max relative primal/dual gap {worst:.2e}, NumericalLimit count {limits}")
    assert ok


def test_criterion_05_oracle_agreement(report):
    t0 = time.perf_counter()
    compared = skipped = disagree = 0
    n_compat = 0
    for e, res in shared_instances():
        if isinstance(res, SolverError):
            disagree += 1
            continue
        if abs(res.value - 1) <= 1e-4:
            skipped += 1
            continue
        compared += 1
        a = is_compatible(e).verdict
        b = is_compatible_marginal_form(e).verdict
        n_compat += a
        disagree += a != b
    dt = time.perf_counter() - t0
    ok = disagree == 0 and dt < 300
    report(
        5,
        ok,
        f"{compared} compared ({n_compat} compatible, {skipped} near boundary skipped), "
        f"{disagree} disagreements, {dt:.1f}s (limit 300s)",
    )
    assert ok


def test_criterion_06_certificates(report):
    worst_marg = worst_sum = 0.0
    min_pair = math.inf
    n_c = n_i = 0
    for e, _ in shared_instances():
        res = is_compatible(e)
        if res.verdict:
            n_c += 1
            worst_marg = max(worst_marg, float(np.max(np.abs(res.joint.effects() - e.effects))))
            worst_sum = max(worst_sum, res.joint.sum_error())
        else:
            n_i += 1
            min_pair = min(min_pair, res.witness.pairing(to_tensor(e)))
    ok = worst_marg <= 1e-7 and worst_sum <= 1e-8 and (n_i == 0 or min_pair > 1 + 1e-7)
    report(
        6,
        ok,
        f"{n_c} joints: marginal error {worst_marg:.1e}, sum error {worst_sum:.1e}; "
        f"{n_i} witnesses: min pairing {min_pair:.6f}",
    )
    assert ok


def test_criterion_07_crossnorm(report):
    rng = np.random.default_rng(MASTER_SEED + 7)
    worst_sand = -math.inf
    for _ in range(200):
        g, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        a = ObservableTuple.random(g, d, rng)
        worst_sand = max(worst_sand, inj_norm_linf(a) - compat_norm(a).value)
    worst_pure = 0.0
    for _ in range(50):
        g, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        z = rng.uniform(-1, 1, g)
        h = random_instance("hermitian_gaussian", d, rng)
        expected = np.abs(z).max() * np.abs(np.linalg.eigvalsh(h)).max()
        worst_pure = max(worst_pure, abs(compat_norm(ObservableTuple.pure_tensor(z, h)).value - expected))
    ok = worst_sand <= 1e-7 and worst_pure <= 1e-6
    report(7, ok, f"max(inj_linf - c) over 200 = {worst_sand:.2e}; pure-tensor max error over 50 = {worst_pure:.2e}")
    assert ok


def test_criterion_08_wit_norm(report):
    rng = np.random.default_rng(MASTER_SEED + 8)
    worst_lb = -math.inf
    for k in range(50):
        g, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        x = ObservableTuple.random(g, d, rng)
        lb = wit_norm_sample_lb(x, 1000, int(rng.integers(2**32)))
        worst_lb = max(worst_lb, lb - wit_norm(x).value)
    worst_g1 = 0.0
    for _ in range(20):
        x = ObservableTuple.random(1, int(rng.integers(1, 5)), rng)
        worst_g1 = max(worst_g1, abs(wit_norm(x).value - np.abs(np.linalg.eigvalsh(x[0])).max()))
    pauli = wit_norm(ObservableTuple.of([SX, SZ])).value
    ok = worst_lb <= 1e-7 and worst_g1 <= 1e-6 and abs(pauli - 2) <= 1e-5
    report(
        8,
        ok,
        f"max(sample_lb - wit) = {worst_lb:.2e}; g=1 max error {worst_g1:.2e}; wit(sx, sz) = {pauli:.8f}",
    )
    assert ok


def test_criterion_09_wit_threshold(report):
    x = ObservableTuple.of([SX, SZ]) / math.sqrt(2)
    lo, hi = 0.0, 2.0
    while hi - lo > 1e-7:
        mid = (lo + hi) / 2
        if wit_norm(x * mid).value <= 1:
            lo = mid
        else:
            hi = mid
    t = (lo + hi) / 2
    c1 = robustness(pauli_effects(SX, SZ), (1, 1)).threshold
    ok = abs(t - INV_SQRT2) <= 1e-4 and abs(t - c1) <= 1e-4
    report(9, ok, f"sup t with wit(t (sx, sz)/sqrt2) <= 1 is {t:.6f}; compatibility threshold {c1:.6f}")
    assert ok


def test_criterion_10_qc_soundness(report):
    rng = np.random.default_rng(MASTER_SEED + 10)
    worst = -math.inf
    for k in range(100):
        g, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        e = mixed_effects(k, g, d, rng)
        s = qc_boundary_point(g, rng)
        worst = max(worst, is_compatible(add_white_noise(e, s)).value)
    ok = worst <= 1 + 1e-6
    report(10, ok, f"100 noisy tuples on the QC boundary: max compatibility norm {worst:.9f}")
    assert ok


def test_criterion_11_witness_pipeline(report):
    rng = np.random.default_rng(MASTER_SEED + 11)
    worst = -math.inf
    for k in range(50):
        g, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        x = ObservableTuple.random(g, d, rng)
        # half on the unit sphere of the injective ball, half strictly inside
        x = x / inj_norm_l1(x) * (1.0 if k % 2 == 0 else rng.uniform(0.5, 1.0))
        rho = random_instance("density_hs", d, rng)
        worst = max(worst, compat_dual_norm(witness_from_pair(x, rho)).value)
    kinds: dict[str, int] = {}
    in_ball = 0
    for _, res in shared_instances():
        if isinstance(res, SolverError):
            continue
        c = classify(res.dual.components, tol=1e-6)
        kinds[c.kind.value] = kinds.get(c.kind.value, 0) + 1
        in_ball += c.in_incompatibility_ball
    ok = worst <= 1 + 1e-6 and in_ball == 100
    report(
        11,
        ok,
        f"max c* over 50 constructed witnesses {worst:.9f}; dual certificates in the "
        f"incompatibility-witness ball {in_ball}/100 {kinds}",
    )
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
