"""Matrix functions on Hermitian and positive semidefinite matrices.

Everything here is a pure function of its inputs. Tolerances default to the
module constants below and can be overridden per call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NotHermitian, NotPsd

TOL_HERM = 1e-10
TOL_RECON = 1e-9
TOL_PSD = 1e-10
RANK_TOL = 1e-8

# first component with modulus above this fixes an eigenvector's phase
_PHASE_TOL = 1e-10
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and the matching unitary of eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_square(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimMismatch(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def check_hermitian(a, tol: float = TOL_HERM, name: str = "matrix") -> np.ndarray:
    """Return `a` as a complex array, raising NotHermitian if ``max|a - a†| > tol``."""
    arr = as_square(a, name)
    dev = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
    if dev > tol:
        raise NotHermitian(f"{name} deviates from Hermitian by {dev:.3g} (tol {tol:g})")
    return arr


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible component is real positive."""
    out = np.array(vectors, dtype=complex, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > _PHASE_TOL)
        if idx.size:
            c = col[idx[0]]
            out[:, j] = col * (np.conj(c) / abs(c))
    return out


def spectral_decomposition(a, tol_herm: float = TOL_HERM) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix with a deterministic phase convention."""
    arr = check_hermitian(a, tol_herm)
    w, v = np.linalg.eigh(hermitize(arr))
    return SpectralDecomposition(eigenvalues=w, eigenvectors=fix_phases(v))


def _clipped_spectrum(a, tol_psd: float, tol_herm: float) -> SpectralDecomposition:
    dec = spectral_decomposition(a, tol_herm)
    w = dec.eigenvalues
    if w.size and w[0] < -tol_psd:
        raise NotPsd(f"eigenvalue {w[0]:.3g} below clipping floor -{tol_psd:g}")
    return SpectralDecomposition(np.clip(w, 0.0, None), dec.eigenvectors)


def is_psd(a, tol_psd: float = TOL_PSD, tol_herm: float = TOL_HERM) -> bool:
    try:
        _clipped_spectrum(a, tol_psd, tol_herm)
    except (NotHermitian, NotPsd):
        return False
    return True


def psd_sqrt(a, tol_psd: float = TOL_PSD, tol_herm: float = TOL_HERM) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol_psd, 0)`` are clipped to zero first; anything more
    negative raises NotPsd. Eigenvalues under the eigensolver's noise floor
    ``dim * eps * lambda_max`` are also zeroed, since their square roots would
    otherwise inject errors of order ``sqrt(eps)``.
    """
    dec = _clipped_spectrum(a, tol_psd, tol_herm)
    w, v = dec.eigenvalues, dec.eigenvectors
    if w.size:
        w = np.where(w > len(w) * _EPS * w[-1], w, 0.0)
    return hermitize((v * np.sqrt(w)) @ v.conj().T)


def support_threshold(eigenvalues: np.ndarray, rank_tol: float = RANK_TOL) -> float:
    """Eigenvalues at or below this value are treated as kernel."""
    lam_max = float(np.max(eigenvalues)) if len(eigenvalues) else 0.0
    return rank_tol * max(lam_max, 0.0)


def numerical_rank(a, rank_tol: float = RANK_TOL) -> int:
    w = np.linalg.eigvalsh(hermitize(as_square(a)))
    if not w.size or w[-1] <= 0:
        return 0
    return int(np.sum(w > support_threshold(w, rank_tol)))


def pinv_sqrt(a, rank_tol: float = RANK_TOL, tol_psd: float = TOL_PSD,
              tol_herm: float = TOL_HERM) -> np.ndarray:
    """Inverse square root on the support of `a`, zero on its kernel.

    `rank_tol` is relative to the largest eigenvalue.
    """
    dec = _clipped_spectrum(a, tol_psd, tol_herm)
    w, v = dec.eigenvalues, dec.eigenvectors
    keep = w > support_threshold(w, rank_tol)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return hermitize((v * inv) @ v.conj().T)


def support_projector(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    dec = _clipped_spectrum(a, TOL_PSD, TOL_HERM)
    w, v = dec.eigenvalues, dec.eigenvectors
    vs = v[:, w > support_threshold(w, rank_tol)]
    return vs @ vs.conj().T


def trace_norm(t) -> float:
    """Sum of singular values, ``Tr sqrt(T† T)``."""
    arr = as_square(t)
    if arr.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(arr, compute_uv=False)))


def _kernel_basis(proj: np.ndarray, count: int) -> np.ndarray:
    """Orthonormal basis of ran(proj) with `count` vectors.

    Pivoted Gram-Schmidt over the projector's columns: each step takes the
    column with the largest residual, ties going to the lowest index. For
    kernels aligned with the standard basis this returns those basis vectors.
    """
    n = proj.shape[0]
    resid = np.array(proj, dtype=complex, copy=True)
    basis = np.zeros((n, count), dtype=complex)
    for k in range(count):
        norms = np.linalg.norm(resid, axis=0)
        j = int(np.flatnonzero(norms >= norms.max() * (1 - 1e-12))[0])
        v = resid[:, j] / norms[j]
        # re-orthogonalise once against the accepted vectors
        v = v - basis[:, :k] @ (basis[:, :k].conj().T @ v)
        v /= np.linalg.norm(v)
        basis[:, k] = v
        resid = resid - np.outer(v, v.conj() @ resid)
    return basis


def polar_unitary(a, b, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Unitary factor V with ``A B = V |A B|`` for positive semidefinite A and B.

    On the support of ``|AB|`` V maps right singular vectors of AB onto left
    ones. On the kernel it pairs index-ordered orthonormal bases of ``ker AB``
    and ``ker (AB)†`` (see `_kernel_basis`). In finite dimension the two
    kernels have equal dimension, so V is always unitary.
    """
    a = check_hermitian(a, name="A")
    b = check_hermitian(b, name="B")
    if a.shape != b.shape:
        raise DimMismatch(f"A is {a.shape}, B is {b.shape}")
    for name, m in (("A", a), ("B", b)):
        w = np.linalg.eigvalsh(hermitize(m))
        if w.size and w[0] < -tol_psd:
            raise NotPsd(f"{name} has eigenvalue {w[0]:.3g}")

    t = a @ b
    n = t.shape[0]
    u, s, vh = np.linalg.svd(t)
    cut = max(s[0], 0.0) * n * _EPS * 10 if n else 0.0
    r = int(np.sum(s > cut)) if n and s[0] > 0 else 0

    v_supp = u[:, :r] @ vh[:r, :]
    right = vh[:r, :].conj().T
    left = u[:, :r]
    ker_right = _kernel_basis(np.eye(n) - right @ right.conj().T, n - r)
    ker_left = _kernel_basis(np.eye(n) - left @ left.conj().T, n - r)
    return v_supp + ker_left @ ker_right.conj().T


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
