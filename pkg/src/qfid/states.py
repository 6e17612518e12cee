"""Density matrices, pure states, purifications and partial traces.

Composite indices on ``H ⊗ K`` are system-major: the amplitude for system
index ``s`` and ancilla index ``a`` lives at ``s * ancilla_dim + a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AncillaTooSmall, DimMismatch, NotDensity
from .linalg import (RANK_TOL, TOL_HERM, TOL_PSD, check_hermitian, hermitize,
                     spectral_decomposition, support_threshold)

TOL_TRACE = 1e-10
TOL_NORM = 1e-10
TOL_PURIFY = 1e-9


def as_density(rho, name: str = "rho") -> np.ndarray:
    """Validate a density matrix and return it as a complex array."""
    arr = check_hermitian(rho, TOL_HERM, name)
    tr = np.trace(arr).real
    if abs(tr - 1.0) > TOL_TRACE:
        raise NotDensity(f"{name} has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh(hermitize(arr))
    if w[0] < -TOL_PSD:
        raise NotDensity(f"{name} has negative eigenvalue {w[0]:.3g}")
    return arr


def as_pure(psi, name: str = "psi") -> np.ndarray:
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > TOL_NORM:
        raise NotDensity(f"{name} has norm {nrm!r}, expected 1")
    return vec


def same_dims(rho: np.ndarray, sigma: np.ndarray) -> None:
    if rho.shape != sigma.shape:
        raise DimMismatch(f"states have shapes {rho.shape} and {sigma.shape}")


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi) -> np.ndarray:
    """``|psi><psi|`` for a (not necessarily normalised) vector."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def is_pure(rho, tol: float = 1e-9) -> bool:
    rho = np.asarray(rho, dtype=complex)
    return bool(np.max(np.abs(rho @ rho - rho)) <= tol)


@dataclass(frozen=True)
class Purification:
    """A unit vector on ``H ⊗ K`` together with the factor dimensions."""

    system_dim: int
    ancilla_dim: int
    state: np.ndarray

    def __post_init__(self):
        vec = as_pure(self.state, "purification")
        if vec.size != self.system_dim * self.ancilla_dim:
            raise DimMismatch(
                f"state has {vec.size} amplitudes, expected "
                f"{self.system_dim} x {self.ancilla_dim}")
        object.__setattr__(self, "state", vec)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(system_dim, ancilla_dim)``."""
        return self.state.reshape(self.system_dim, self.ancilla_dim)

    def overlap(self, other: "Purification") -> complex:
        if (self.system_dim, self.ancilla_dim) != (other.system_dim, other.ancilla_dim):
            raise DimMismatch("purifications live on different spaces")
        return complex(np.vdot(self.state, other.state))

    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.as_matrix(), compute_uv=False)


def partial_trace_ancilla(psi: Purification) -> np.ndarray:
    """Reduced state on the system factor."""
    m = psi.as_matrix()
    return hermitize(m @ m.conj().T)


def _ancilla_frame(rho: np.ndarray, rank_tol: float) -> tuple[np.ndarray, np.ndarray, int]:
    """Eigenvalues and eigenvectors of rho ordered for pairing with ancilla kets.

    Support eigenvectors come first in ascending eigenvalue order, followed by
    the kernel eigenvectors, so the support always pairs with ancilla kets
    ``0 .. rank-1``.
    """
    dec = spectral_decomposition(rho)
    w = np.clip(dec.eigenvalues, 0.0, None)
    supp = w > support_threshold(w, rank_tol)
    order = np.concatenate([np.flatnonzero(supp), np.flatnonzero(~supp)])
    return w[order], dec.eigenvectors[:, order], int(supp.sum())


def purification_frame(rho, ancilla_dim: int | None = None,
                       rank_tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sqrt_rho, Y)`` with the canonical purification matrix ``sqrt_rho @ Y``.

    ``Y`` is a ``dim x ancilla_dim`` matrix sending the paired ancilla kets to
    the eigenvectors of rho. It has orthonormal rows when ``ancilla_dim >= dim``;
    otherwise only the support eigenvectors are paired.
    """
    rho = as_density(rho)
    dim = rho.shape[0]
    anc = dim if ancilla_dim is None else int(ancilla_dim)
    w, v, rank = _ancilla_frame(rho, rank_tol)
    if anc < rank:
        raise AncillaTooSmall(f"ancilla_dim {anc} < rank {rank}")
    npair = min(anc, dim)
    y = np.zeros((dim, anc), dtype=complex)
    y[:, :npair] = v[:, :npair]
    w = np.where(np.arange(dim) < rank, w, 0.0)
    sqrt_rho = (v * np.sqrt(w)) @ v.conj().T
    return sqrt_rho, y


def purify(rho, ancilla_dim: int | None = None, rank_tol: float = RANK_TOL) -> Purification:
    """Canonical purification ``sum_i sqrt(p_i) |v_i> |i>``.

    The support eigenvectors of rho, in ascending eigenvalue order, pair with
    ancilla kets ``0, 1, ...``. `ancilla_dim` defaults to the system dimension
    and must be at least the rank of rho.
    """
    rho = as_density(rho)
    dim = rho.shape[0]
    anc = dim if ancilla_dim is None else int(ancilla_dim)
    w, v, rank = _ancilla_frame(rho, rank_tol)
    if anc < rank:
        raise AncillaTooSmall(f"ancilla_dim {anc} < rank {rank}")
    mat = np.zeros((dim, anc), dtype=complex)
    mat[:, :rank] = v[:, :rank] * np.sqrt(w[:rank])
    vec = mat.reshape(-1)
    vec = vec / np.linalg.norm(vec)
    return Purification(dim, anc, vec)
