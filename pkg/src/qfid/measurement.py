"""POVMs, induced outcome distributions, and optimal measurements.

Two closed-form measurements are provided: the fidelity-optimal projective
measurement in the eigenbasis of ``M = rho^[-1/2] sqrt(sqrt(rho) sigma sqrt(rho)) rho^[-1/2]``
and the Helstrom measurement, which attains the trace distance. The lifted
truncation POVM compresses both states onto the top eigenvectors of rho,
solves the small problem, and pads the result back to the full space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatch, InvalidPovm, InvalidTruncation
from .fidelity import fidelity
from .linalg import (RANK_TOL, TOL_PSD, hermitize, pinv_sqrt, psd_sqrt,
                     spectral_decomposition, support_threshold)
from .states import as_density, same_dims

TOL_COMPLETE = 1e-8
TOL_PROB = 1e-10
TOL_PROB_SUM = 1e-8
MIN_TRUNC_MASS = 1e-12


class Povm:
    """Finite list of positive semidefinite effects summing to the identity.

    Zero effects are kept; callers rely on a stable number of outcomes.
    """

    def __init__(self, effects: Sequence, check: bool = True):
        self.effects = tuple(np.asarray(e, dtype=complex) for e in effects)
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"Povm(<{len(self.effects)} effects, dim {self.dim}>)"

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)

    def validate(self) -> None:
        if not self.effects:
            raise InvalidPovm("POVM has no effects")
        n = self.effects[0].shape[0]
        total = np.zeros((n, n), dtype=complex)
        for k, e in enumerate(self.effects):
            if e.shape != (n, n):
                raise InvalidPovm(f"effect {k} has shape {e.shape}, expected {(n, n)}")
            if np.max(np.abs(e - e.conj().T)) > 1e-10:
                raise InvalidPovm(f"effect {k} is not Hermitian")
            w = np.linalg.eigvalsh(hermitize(e))
            if w[0] < -TOL_PSD:
                raise InvalidPovm(f"effect {k} has negative eigenvalue {w[0]:.3g}")
            total += e
        dev = np.max(np.abs(total - np.eye(n)))
        if dev > TOL_COMPLETE:
            raise InvalidPovm(f"effects sum to identity only within {dev:.3g}")


def as_distribution(p) -> np.ndarray:
    """Clamp tiny negatives and check normalisation of a probability vector."""
    arr = np.asarray(p, dtype=float).reshape(-1)
    if np.any(arr < -TOL_PROB):
        raise ValueError(f"probability {arr.min():.3g} is negative")
    arr = np.clip(arr, 0.0, None)
    s = arr.sum()
    if abs(s - 1.0) > TOL_PROB_SUM:
        raise ValueError(f"probabilities sum to {s!r}")
    return arr / s


def induced_distribution(state, povm: Povm) -> np.ndarray:
    """Outcome probabilities ``p_m = Tr(state E_m)``."""
    rho = as_density(state, "state")
    if rho.shape[0] != povm.dim:
        raise DimMismatch(f"state has dim {rho.shape[0]}, POVM has dim {povm.dim}")
    # Tr(rho E) = sum_ij rho_ij E_ji
    p = np.array([np.sum(rho * e.T).real for e in povm.effects])
    try:
        return as_distribution(p)
    except ValueError as exc:
        raise InvalidPovm(str(exc)) from exc


def _check_lengths(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise DimMismatch(f"distributions have lengths {p.size} and {q.size}")
    return p, q


def classical_fidelity(p, q) -> float:
    """Bhattacharyya coefficient ``sum_m sqrt(p_m q_m)``."""
    p, q = _check_lengths(p, q)
    f = float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None))))
    return min(max(f, 0.0), 1.0)


def classical_trace_distance(p, q) -> float:
    p, q = _check_lengths(p, q)
    return 0.5 * float(np.sum(np.abs(p - q)))


@dataclass(frozen=True)
class MOperator:
    matrix: np.ndarray
    support_projector: np.ndarray
    # every finite Hermitian matrix is diagonalisable
    is_diagonalizable: bool = True


def m_operator(rho, sigma, rank_tol: float = RANK_TOL) -> MOperator:
    """``rho^[-1/2] sqrt(sqrt(rho) sigma sqrt(rho)) rho^[-1/2]`` with the inverse taken on supp(rho)."""
    rho = as_density(rho, "rho")
    sigma = as_density(sigma, "sigma")
    same_dims(rho, sigma)
    sr = psd_sqrt(rho)
    middle = psd_sqrt(hermitize(sr @ sigma @ sr))
    inv = pinv_sqrt(rho, rank_tol)
    m = hermitize(inv @ middle @ inv)
    proj = hermitize(inv @ rho @ inv)
    return MOperator(matrix=m, support_projector=proj)


def _support_split(rho: np.ndarray, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    dec = spectral_decomposition(rho)
    w = dec.eigenvalues
    supp = w > support_threshold(np.clip(w, 0, None), rank_tol)
    return dec.eigenvectors[:, supp], dec.eigenvectors[:, ~supp]


def fidelity_optimal_basis(rho, sigma, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal columns: eigenvectors of M inside supp(rho), then a basis of ker(rho).

    M is diagonalised after compression to supp(rho). Diagonalising it on the
    whole space could mix its kernel across supp(rho) and ker(rho), and such
    mixed vectors do not attain the fidelity.
    """
    rho = as_density(rho, "rho")
    sigma = as_density(sigma, "sigma")
    same_dims(rho, sigma)
    s_basis, k_basis = _support_split(rho, rank_tol)
    m = m_operator(rho, sigma, rank_tol).matrix
    m1 = hermitize(s_basis.conj().T @ m @ s_basis)
    vecs = s_basis @ spectral_decomposition(m1).eigenvectors
    return np.column_stack([vecs, k_basis]) if k_basis.size else vecs


def fidelity_optimal_povm(rho, sigma, rank_tol: float = RANK_TOL) -> Povm:
    """Projective measurement whose outcome distributions have classical fidelity F(rho, sigma)."""
    basis = fidelity_optimal_basis(rho, sigma, rank_tol)
    return Povm([np.outer(v, v.conj()) for v in basis.T])


def helstrom_povm(rho, sigma) -> Povm:
    """Two-outcome projective measurement onto the sign eigenspaces of ``rho - sigma``.

    Zero eigenvalues go with the first effect.
    """
    rho = as_density(rho, "rho")
    sigma = as_density(sigma, "sigma")
    same_dims(rho, sigma)
    w, v = np.linalg.eigh(hermitize(rho - sigma))
    pos = v[:, w >= -1e-14]
    e0 = pos @ pos.conj().T
    e1 = np.eye(rho.shape[0]) - e0
    return Povm([hermitize(e0), hermitize(e1)])


@dataclass(frozen=True)
class LiftedPovm:
    """Result of `lifted_truncation_povm`.

    ``povm.effects`` is ``(F_0, F_1, ..., F_n, F_{n+1})`` where ``F_0`` carries
    the weight lost by the truncation and ``F_{n+1}`` is the lifted image of
    ``I - P_n`` (identically zero, kept so the shape depends only on n).
    """

    povm: Povm
    gap: float
    alpha: float
    beta: float
    classical_fidelity: float
    quantum_fidelity: float
    truncated_fidelity: float


def lifted_truncation_povm(rho, sigma, trunc_dim: int) -> LiftedPovm:
    """Lift the optimal POVM of the truncated pair back to the full space.

    With P_n the projector onto the `trunc_dim` leading eigenvectors of rho,
    alpha = Tr(P_n rho P_n), beta = Tr(P_n sigma P_n), the truncated states are
    ``P_n rho P_n / alpha`` and ``P_n sigma P_n / beta``. Their optimal effects
    ``E_m`` are scaled to ``sqrt(alpha beta) P_n E_m P_n`` and completed by
    ``F_0 = I - sqrt(alpha beta) P_n``. The returned gap is the classical
    fidelity of the lifted POVM minus F(rho, sigma); it is never negative
    beyond round-off.
    """
    rho = as_density(rho, "rho")
    sigma = as_density(sigma, "sigma")
    same_dims(rho, sigma)
    dim = rho.shape[0]
    n = int(trunc_dim)
    if not 1 <= n <= dim:
        raise InvalidTruncation(f"trunc_dim must be in [1, {dim}], got {n}")

    dec = spectral_decomposition(rho)
    # descending eigenvalue order so P_n captures the most rho-mass
    vn = dec.eigenvectors[:, ::-1][:, :n]
    rho_c = hermitize(vn.conj().T @ rho @ vn)
    sigma_c = hermitize(vn.conj().T @ sigma @ vn)
    alpha = float(np.trace(rho_c).real)
    beta = float(np.trace(sigma_c).real)
    if alpha < MIN_TRUNC_MASS or beta < MIN_TRUNC_MASS:
        raise InvalidTruncation(f"truncated mass too small: alpha={alpha:.3g}, beta={beta:.3g}")

    rho_n, sigma_n = rho_c / alpha, sigma_c / beta
    small = fidelity_optimal_povm(rho_n, sigma_n)
    scale = np.sqrt(alpha * beta)
    p_n = vn @ vn.conj().T
    lifted = [hermitize(np.eye(dim) - scale * p_n)]
    lifted += [hermitize(scale * (vn @ e @ vn.conj().T)) for e in small.effects]
    # P_n (I - P_n) P_n = 0
    lifted.append(np.zeros((dim, dim), dtype=complex))
    povm = Povm(lifted)

    cf = classical_fidelity(induced_distribution(rho, povm), induced_distribution(sigma, povm))
    qf = fidelity(rho, sigma)
    return LiftedPovm(povm=povm, gap=cf - qf, alpha=alpha, beta=beta,
                      classical_fidelity=cf, quantum_fidelity=qf,
                      truncated_fidelity=fidelity(rho_n, sigma_n))
