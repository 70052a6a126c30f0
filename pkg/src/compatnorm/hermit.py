"""Dense complex Hermitian linear algebra.

Hermitian matrices are plain ``numpy`` complex arrays of shape ``(d, d)``.
:func:`hermitian` is the ingest point: it validates, symmetrizes and freezes
the array. Everything downstream assumes its inputs went through it (or
through :func:`herm` for internally computed values).
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, NotPsd

HERMITICITY_RTOL = 1e-12
PSD_RTOL = 1e-9

SCHATTEN_P = (1, 2, np.inf)
RANDOM_KINDS = ("effect", "density_hs", "hermitian_gaussian", "pure_state")


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns


def herm(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part ``(a + a^*) / 2`` as a complex array."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().swapaxes(-1, -2)) / 2


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def hermitian(data, *, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Validate ``data`` as a Hermitian matrix and return a read-only copy.

    The input is averaged with its conjugate transpose. Inputs whose
    anti-Hermitian part exceeds ``rtol * max(1, ||data||_max)`` are rejected.
    """
    a = np.array(data, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInput(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    skew = float(np.max(np.abs(a - a.conj().T)))
    if skew > 2 * rtol * scale:
        raise InvalidInput(f"matrix is not Hermitian (max |H - H*| = {skew:.3e})")
    return _freeze(herm(a))


def eig(h: np.ndarray) -> Spectrum:
    """Eigendecomposition with ascending real eigenvalues.

    Uses LAPACK ``heevd`` through :func:`numpy.linalg.eigh`, which is
    deterministic for a fixed input.
    """
    h = np.asarray(h)
    if not np.all(np.isfinite(h)):
        raise InvalidInput("matrix has non-finite entries")
    w, v = np.linalg.eigh(herm(h))
    return Spectrum(w, v)


def eigvalsh(h: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(herm(h))


def op_norm(h: np.ndarray) -> float:
    """Operator norm of a Hermitian matrix (largest absolute eigenvalue)."""
    w = eigvalsh(h)
    return float(max(abs(w[0]), abs(w[-1])))


def schatten_norm(h: np.ndarray, p) -> float:
    """Schatten ``p``-norm of a Hermitian matrix for ``p`` in ``{1, 2, inf}``."""
    if p in ("inf", "infinity"):
        p = np.inf
    if p not in SCHATTEN_P:
        raise InvalidInput(f"unsupported Schatten exponent {p!r}; use 1, 2 or inf")
    w = np.abs(eigvalsh(h))
    if p == 1:
        return float(w.sum())
    if p == 2:
        return float(np.sqrt(np.sum(w**2)))
    return float(w.max())


def psd_tol(h: np.ndarray) -> float:
    """PSD tolerance ``1e-9 * max(1, ||h||_inf)``."""
    return PSD_RTOL * max(1.0, op_norm(h))


def min_eig(h: np.ndarray) -> float:
    return float(eigvalsh(h)[0])


def is_psd(h: np.ndarray, tol: float | None = None) -> bool:
    w = eigvalsh(h)
    if tol is None:
        tol = PSD_RTOL * max(1.0, abs(w[0]), abs(w[-1]))
    return bool(w[0] >= -tol)


def psd_sqrt(h: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-tol_psd, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPsd`.
    """
    w, v = eig(h)
    tol = PSD_RTOL * max(1.0, abs(w[0]), abs(w[-1]))
    if w[0] < -tol:
        raise NotPsd(float(w[0]), tol)
    root = np.sqrt(np.clip(w, 0.0, None))
    return herm((v * root) @ v.conj().T)


def psd_pinv_sqrt(h: np.ndarray, rtol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(h^{-1/2} on supp(h), projector onto supp(h))``.

    Eigenvalues below ``rtol * lambda_max`` are treated as kernel.
    """
    w, v = eig(h)
    cut = rtol * max(float(w[-1]), 0.0)
    keep = w > cut
    inv_root = np.zeros_like(w)
    inv_root[keep] = 1.0 / np.sqrt(w[keep])
    vk = v[:, keep]
    return herm((v * inv_root) @ v.conj().T), herm(vk @ vk.conj().T)


def positive_part_projector(h: np.ndarray) -> np.ndarray:
    """Spectral projector onto the eigenvectors with eigenvalue >= 0."""
    w, v = eig(h)
    vk = v[:, w >= 0]
    return herm(vk @ vk.conj().T)


def density_matrix(data, tol: float | None = None) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD within tolerance, unit trace."""
    rho = hermitian(data)
    w = eigvalsh(rho)
    if tol is None:
        tol = PSD_RTOL * max(1.0, abs(w[0]), abs(w[-1]))
    if w[0] < -tol:
        raise NotPsd(float(w[0]), tol)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-10:
        raise InvalidInput(f"density matrix must have unit trace, got {tr!r}")
    return rho


@lru_cache(maxsize=64)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of the real space of d x d Hermitian matrices.

    Returns an array of shape ``(d*d, d, d)``: first the diagonal units, then
    for each ``j < k`` the real and imaginary off-diagonal pairs, so that
    ``Tr[B @ X]`` reads off (scaled) entries of the upper triangle of ``X``.
    """
    basis = []
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    s = 1.0 / np.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            re = np.zeros((d, d), dtype=complex)
            re[j, k] = re[k, j] = s
            im = np.zeros((d, d), dtype=complex)
            im[j, k] = 1j * s
            im[k, j] = -1j * s
            basis.append(re)
            basis.append(im)
    out = np.array(basis)
    return _freeze(out)


def to_real_coords(h: np.ndarray) -> np.ndarray:
    """Coordinates of a Hermitian matrix in :func:`hermitian_basis`."""
    h = np.asarray(h)
    basis = hermitian_basis(h.shape[-1])
    return np.einsum("kab,...ba->...k", basis, h).real


def from_real_coords(coords: np.ndarray, d: int) -> np.ndarray:
    return herm(np.einsum("...k,kab->...ab", coords, hermitian_basis(d)))


# --- random instances -------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(d: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    cols = d if cols is None else cols
    return (rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))) / np.sqrt(2)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(d, rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_unit_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(d, rng, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_instance(kind: str, d: int, seed) -> np.ndarray:
    """Seeded random Hermitian test instance.

    ``effect``: Haar-rotated diagonal with eigenvalues uniform in [0, 1].
    ``density_hs``: Hilbert-Schmidt random density matrix ``G G^* / Tr``.
    ``hermitian_gaussian``: GUE sample ``(G + G^*) / 2``.
    ``pure_state``: ``|psi><psi|`` for a uniformly random unit vector.
    """
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidInput(f"dimension must be a positive integer, got {d!r}")
    if kind not in RANDOM_KINDS:
        raise InvalidInput(f"unknown instance kind {kind!r}; expected one of {RANDOM_KINDS}")
    rng = _rng(seed)
    if kind == "effect":
        u = haar_unitary(d, rng)
        w = rng.uniform(0.0, 1.0, size=d)
        out = (u * w) @ u.conj().T
    elif kind == "density_hs":
        g = ginibre(d, rng)
        out = g @ g.conj().T
        out = out / np.trace(out).real
    elif kind == "hermitian_gaussian":
        out = ginibre(d, rng)
    else:
        v = random_unit_vector(d, rng)
        out = np.outer(v, v.conj())
    return _freeze(herm(out))


# Pauli matrices, read-only.
I2 = _freeze(np.eye(2, dtype=complex))
SX = _freeze(np.array([[0, 1], [1, 0]], dtype=complex))
SY = _freeze(np.array([[0, -1j], [1j, 0]], dtype=complex))
SZ = _freeze(np.array([[1, 0], [0, -1]], dtype=complex))
PAULIS = (SX, SY, SZ)
