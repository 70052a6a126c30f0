from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compatnorm.errors import InvalidInput, NotPsd
from compatnorm.hermit import (
    PAULIS,
    SX,
    density_matrix,
    eig,
    from_real_coords,
    haar_unitary,
    hermitian,
    hermitian_basis,
    is_psd,
    op_norm,
    positive_part_projector,
    psd_pinv_sqrt,
    psd_sqrt,
    random_instance,
    schatten_norm,
    to_real_coords,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)


def test_hermitian_rejects_skew_part():
    with pytest.raises(InvalidInput):
        hermitian([[0, 1], [0, 0]])


def test_hermitian_is_read_only():
    h = hermitian(np.eye(2))
    with pytest.raises(ValueError):
        h[0, 0] = 3


def test_schatten_norms_of_pauli():
    assert schatten_norm(SX, 1) == pytest.approx(2)
    assert schatten_norm(SX, 2) == pytest.approx(np.sqrt(2))
    assert schatten_norm(SX, "inf") == pytest.approx(1)
    with pytest.raises(InvalidInput):
        schatten_norm(SX, 3)


@given(seeds, dims)
def test_schatten_norms_match_numpy(seed, d):
    h = random_instance("hermitian_gaussian", d, seed)
    assert schatten_norm(h, 1) == pytest.approx(np.linalg.norm(h, "nuc"), rel=1e-10)
    assert schatten_norm(h, 2) == pytest.approx(np.linalg.norm(h, "fro"), rel=1e-10)
    assert op_norm(h) == pytest.approx(np.linalg.norm(h, 2), rel=1e-10)


@given(seeds, dims)
def test_eig_reconstructs(seed, d):
    h = random_instance("hermitian_gaussian", d, seed)
    vals, vecs = eig(h)
    assert np.all(np.diff(vals) >= 0)
    np.testing.assert_allclose((vecs * vals) @ vecs.conj().T, h, atol=1e-10)


@given(seeds, dims)
def test_psd_sqrt_squares_back(seed, d):
    rho = random_instance("density_hs", d, seed)
    r = psd_sqrt(rho)
    np.testing.assert_allclose(r @ r, rho, atol=1e-12)
    assert is_psd(r)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPsd):
        psd_sqrt(SX)


def test_pinv_sqrt_on_rank_deficient_state():
    rho = np.diag([0.5, 0.5, 0.0])
    inv, proj = psd_pinv_sqrt(rho)
    np.testing.assert_allclose(proj, np.diag([1, 1, 0]), atol=1e-12)
    np.testing.assert_allclose(inv, np.diag([np.sqrt(2), np.sqrt(2), 0]), atol=1e-12)


@given(seeds, dims)
def test_positive_part_projector(seed, d):
    h = random_instance("hermitian_gaussian", d, seed)
    p = positive_part_projector(h)
    np.testing.assert_allclose(p @ p, p, atol=1e-10)
    assert np.trace(p @ h).real == pytest.approx(np.clip(np.linalg.eigvalsh(h), 0, None).sum())


@given(dims)
def test_hermitian_basis_is_orthonormal(d):
    b = hermitian_basis(d)
    gram = np.einsum("iab,jba->ij", b, b)
    np.testing.assert_allclose(gram, np.eye(d * d), atol=1e-12)


@given(seeds, dims)
def test_real_coords_round_trip(seed, d):
    h = random_instance("hermitian_gaussian", d, seed)
    c = to_real_coords(h)
    assert c.shape == (d * d,)
    np.testing.assert_allclose(from_real_coords(c, d), h, atol=1e-12)
    assert np.linalg.norm(c) == pytest.approx(np.linalg.norm(h, "fro"))


@given(seeds, dims, st.sampled_from(["effect", "density_hs", "pure_state"]))
def test_random_instances_are_valid(seed, d, kind):
    a = random_instance(kind, d, seed)
    assert is_psd(a)
    if kind == "effect":
        assert is_psd(np.eye(d) - a)
    else:
        density_matrix(a)
    if kind == "pure_state":
        assert np.trace(a @ a).real == pytest.approx(1)


def test_random_instance_deterministic():
    np.testing.assert_array_equal(random_instance("effect", 3, 7), random_instance("effect", 3, 7))


@given(seeds, dims)
def test_haar_unitary_is_unitary(seed, d):
    u = haar_unitary(d, np.random.default_rng(seed))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


def test_density_matrix_checks_trace():
    with pytest.raises(InvalidInput):
        density_matrix(np.eye(2))


def test_paulis_anticommute():
    for i in range(3):
        for j in range(i + 1, 3):
            np.testing.assert_allclose(PAULIS[i] @ PAULIS[j] + PAULIS[j] @ PAULIS[i], 0)
