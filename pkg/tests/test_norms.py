from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compatnorm.errors import InvalidInput, TooManyMeasurements
from compatnorm.hermit import SX, SY, SZ, random_instance
from compatnorm.norms import (
    ObservableTuple,
    compat_dual_norm,
    compat_norm,
    inj_norm_l1,
    inj_norm_linf,
    proj_norm_l1,
    sign_vectors,
    wit_norm,
    wit_norm_sample_lb,
    wit_objective,
)

from .oracles import bloch, cvx_compat_norm, cvx_wit_norm, qubit_pair_compat_norm

seeds = st.integers(0, 2**32 - 1)
shapes = st.tuples(st.integers(1, 3), st.integers(1, 3))


def rand_tuple(seed, g, d):
    return ObservableTuple.random(g, d, seed)


# --- compatibility norm -----------------------------------------------------


@pytest.mark.parametrize(
    "mats, expected",
    [([SZ, SZ], 1.0), ([SX, SZ], np.sqrt(2)), ([SX, SY, SZ], np.sqrt(3))],
)
def test_compat_norm_reference_values(mats, expected):
    res = compat_norm(ObservableTuple.of(mats))
    assert res.value == pytest.approx(expected, abs=1e-7)
    assert res.dual.value == pytest.approx(expected, abs=1e-6)


def test_zero_tuple():
    res = compat_norm(ObservableTuple.zeros(2, 3))
    assert res.value == 0
    assert np.trace(res.dual.state).real == pytest.approx(1)


@settings(max_examples=30)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_qubit_pair_matches_analytic_formula(v):
    a, b = np.array(v[:3]), np.array(v[3:])
    expected = qubit_pair_compat_norm(a, b)
    got = compat_norm(ObservableTuple.of([bloch(a), bloch(b)])).value
    assert got == pytest.approx(expected, abs=1e-6)


@settings(max_examples=8)
@given(seeds, st.integers(2, 3), st.integers(2, 3))
def test_matches_independent_sdp_model(seed, g, d):
    a = rand_tuple(seed, g, d)
    assert compat_norm(a).value == pytest.approx(cvx_compat_norm(a.components), rel=1e-5, abs=1e-6)


@given(seeds, shapes)
def test_decomposition_reconstructs_input(seed, shape):
    a = rand_tuple(seed, *shape)
    res = compat_norm(a)
    dec = res.primal
    assert dec.reconstruct().allclose(a, atol=1e-7)
    for k in dec.blocks:
        assert np.linalg.eigvalsh(k)[0] >= -1e-8
    top = np.linalg.eigvalsh(dec.total())[-1]
    assert top <= res.value + 1e-7


@given(seeds, shapes)
def test_dual_witness_is_feasible_and_tight(seed, shape):
    a = rand_tuple(seed, *shape)
    res = compat_norm(a)
    w = res.dual
    assert np.trace(w.state).real <= 1 + 1e-9
    assert w.min_slack_eigenvalue() >= -1e-7
    assert w.pairing(a) == pytest.approx(res.value, rel=1e-6, abs=1e-8)


@given(seeds, shapes, st.floats(-3, 3))
def test_absolute_homogeneity(seed, shape, t):
    a = rand_tuple(seed, *shape)
    assert compat_norm(a * t).value == pytest.approx(abs(t) * compat_norm(a).value, rel=1e-6, abs=1e-7)


@given(seeds, seeds, shapes)
def test_triangle_inequality(s1, s2, shape):
    a, b = rand_tuple(s1, *shape), rand_tuple(s2, *shape)
    assert compat_norm(a + b).value <= compat_norm(a).value + compat_norm(b).value + 1e-6


@given(seeds, shapes)
def test_crossnorm_sandwich(seed, shape):
    a = rand_tuple(seed, *shape)
    c = compat_norm(a).value
    assert inj_norm_linf(a) <= c + 1e-7
    assert c <= sum(np.abs(np.linalg.eigvalsh(x)).max() for x in a) + 1e-7


@given(seeds, st.integers(1, 4), st.integers(1, 3))
def test_pure_tensors(seed, g, d):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1, 1, g)
    h = random_instance("hermitian_gaussian", d, rng)
    expected = np.abs(z).max() * np.abs(np.linalg.eigvalsh(h)).max()
    assert compat_norm(ObservableTuple.pure_tensor(z, h)).value == pytest.approx(expected, rel=1e-6, abs=1e-8)


@given(seeds, st.integers(1, 4))
def test_single_measurement_is_operator_norm(seed, d):
    a = rand_tuple(seed, 1, d)
    assert compat_norm(a).value == pytest.approx(np.abs(np.linalg.eigvalsh(a[0])).max(), rel=1e-6, abs=1e-8)


def test_permuting_measurements_and_unitary_invariance():
    a = rand_tuple(11, 3, 3)
    base = compat_norm(a).value
    perm = ObservableTuple(a.components[[2, 0, 1]])
    u = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))[0]
    rot = ObservableTuple(u[None] @ a.components @ u.T[None])
    assert compat_norm(perm).value == pytest.approx(base, rel=1e-7)
    assert compat_norm(rot).value == pytest.approx(base, rel=1e-7)


def test_guard_on_number_of_measurements():
    with pytest.raises(TooManyMeasurements):
        compat_norm(ObservableTuple.zeros(9, 2) + ObservableTuple.pure_tensor(np.ones(9), SZ))


# --- dual norm ----------------------------------------------------------------


def test_dual_norm_reference_values():
    assert compat_dual_norm(ObservableTuple.of([SZ / 2])).value == pytest.approx(1, abs=1e-7)
    v = compat_dual_norm(ObservableTuple.of([SX / 4, SZ / 4])).value
    assert v == pytest.approx(1 / np.sqrt(2), abs=1e-7)


@given(seeds, shapes)
def test_dual_norm_state_is_feasible(seed, shape):
    phi = rand_tuple(seed, *shape)
    res = compat_dual_norm(phi)
    assert np.trace(res.state).real == pytest.approx(1)
    rho = res.value * res.state
    for eps in sign_vectors(phi.g):
        slack = rho - np.einsum("i,iab->ab", eps, phi.components)
        assert np.linalg.eigvalsh(slack)[0] >= -1e-7
    assert res.maximizer.pairing(phi) == pytest.approx(res.value, rel=1e-6, abs=1e-8)
    # the maximizer is an extreme point of the unit ball (a degenerate
    # input for interior-point methods); membership is checked independently
    assert cvx_compat_norm(res.maximizer.components) <= 1 + 1e-6


@given(seeds, seeds, shapes)
def test_duality_pairing_bound(s1, s2, shape):
    a, phi = rand_tuple(s1, *shape), rand_tuple(s2, *shape)
    assert abs(a.pairing(phi)) <= compat_norm(a).value * compat_dual_norm(phi).value + 1e-6


@given(seeds, st.integers(1, 4))
def test_dual_of_single_measurement_is_trace_norm(seed, d):
    phi = rand_tuple(seed, 1, d)
    expected = np.abs(np.linalg.eigvalsh(phi[0])).sum()
    assert compat_dual_norm(phi).value == pytest.approx(expected, rel=1e-6, abs=1e-8)


# --- witness norm -------------------------------------------------------------


def test_wit_norm_reference_values():
    assert wit_norm(ObservableTuple.of([SZ])).value == pytest.approx(1, abs=1e-7)
    assert wit_norm(ObservableTuple.of([SX, SZ])).value == pytest.approx(2, abs=1e-6)


@settings(max_examples=8)
@given(seeds, st.integers(1, 3), st.integers(2, 3))
def test_wit_norm_matches_independent_model(seed, g, d):
    x = rand_tuple(seed, g, d)
    assert wit_norm(x).value == pytest.approx(cvx_wit_norm(x.components), rel=1e-5, abs=1e-6)


@given(seeds, shapes)
def test_wit_decomposition_and_sampling_bound(seed, shape):
    x = rand_tuple(seed, *shape)
    res = wit_norm(x)
    dec = res.decomposition
    assert dec.reconstruct().allclose(x, atol=1e-7)
    assert wit_norm_sample_lb(x, 50, seed) <= res.value + 1e-7


@given(seeds, shapes)
def test_wit_objective_at_optimal_state(seed, shape):
    x = rand_tuple(seed, *shape)
    rho = random_instance("density_hs", shape[1], seed)
    assert wit_objective(x, rho) <= wit_norm(x).value + 1e-7


@given(seeds, st.integers(1, 4))
def test_wit_norm_single_measurement(seed, d):
    x = rand_tuple(seed, 1, d)
    assert wit_norm(x).value == pytest.approx(np.abs(np.linalg.eigvalsh(x[0])).max(), rel=1e-6, abs=1e-8)


# --- closed forms ---------------------------------------------------------------


@given(seeds, shapes)
def test_inj_norm_l1_brute_force(seed, shape):
    x = rand_tuple(seed, *shape)
    brute = max(
        np.abs(np.linalg.eigvalsh(np.einsum("i,iab->ab", np.array(e), x.components))).max()
        for e in np.array(np.meshgrid(*[[1, -1]] * x.g)).T.reshape(-1, x.g)
    )
    assert inj_norm_l1(x) == pytest.approx(brute, rel=1e-12)


def test_closed_form_values():
    x = ObservableTuple.of([SX, SZ])
    assert inj_norm_l1(x) == pytest.approx(np.sqrt(2))
    assert proj_norm_l1(x) == pytest.approx(4)
    assert inj_norm_linf(x) == pytest.approx(1)
    assert inj_norm_l1(ObservableTuple.of([SZ, SZ])) == pytest.approx(2)


@given(seeds, shapes)
def test_norm_ordering(seed, shape):
    x = rand_tuple(seed, *shape)
    assert inj_norm_l1(x) <= proj_norm_l1(x) + 1e-12
    assert inj_norm_linf(x) <= inj_norm_l1(x) + 1e-12


def test_tuple_validation():
    with pytest.raises(InvalidInput):
        ObservableTuple.of([SX, np.eye(3)])
    with pytest.raises(InvalidInput):
        ObservableTuple.of([[[0, 1], [0, 0]]])
