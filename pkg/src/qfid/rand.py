"""Seeded random instances for tests and property suites.

Every generator takes an explicit seed or ``numpy.random.Generator``; nothing
touches global random state. `make_rng` derives independent streams from a
base seed plus integer counters, so trial ``k`` of a suite always sees the
same numbers no matter which other trials run.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter
from .linalg import haar_unitary, hermitize, pinv_sqrt


def make_rng(seed=None, *counters: int) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        if counters:
            raise TypeError("counters need an integer base seed")
        return seed
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng([int(seed), *[int(c) for c in counters]])


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Matrix of independent standard complex Gaussians."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_density(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """``G G† / Tr(G G†)`` with ``G`` a ``dim x rank`` Ginibre matrix."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InvalidParameter(f"rank must be in [1, {dim}], got {rank}")
    g = ginibre(dim, rank, make_rng(seed))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_pure(dim: int, seed=None) -> np.ndarray:
    v = ginibre(dim, 1, make_rng(seed))[:, 0]
    return v / np.linalg.norm(v)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    return haar_unitary(dim, make_rng(seed))


def random_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """Haar isometry ``W`` of shape ``(rows, cols)``, ``W† W = I``."""
    if rows < cols:
        raise InvalidParameter("isometry needs rows >= cols")
    return haar_unitary(rows, make_rng(seed))[:, :cols]


def random_psd(dim: int, rank: int | None = None, scale: float = 1.0, seed=None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = ginibre(dim, rank, make_rng(seed))
    return hermitize(scale * (g @ g.conj().T))


def random_povm_effects(dim: int, count: int, seed=None) -> list[np.ndarray]:
    """Random POVM: PSD draws ``A_k`` normalised as ``S^{-1/2} A_k S^{-1/2}``, ``S = sum A_k``."""
    rng = make_rng(seed)
    # total rank >= dim keeps S invertible
    min_rank = -(-dim // count)
    draws = []
    for _ in range(count):
        rank = int(rng.integers(min_rank, dim + 1))
        g = ginibre(dim, rank, rng)
        draws.append(g @ g.conj().T)
    s_inv = pinv_sqrt(hermitize(sum(draws)), rank_tol=0.0)
    return [hermitize(s_inv @ a @ s_inv) for a in draws]


def random_kraus(dim: int, count: int, seed=None) -> list[np.ndarray]:
    """Kraus operators sliced from a Haar isometry ``C^dim -> C^(dim*count)``."""
    w = random_isometry(dim * count, dim, seed)
    return [w[i * dim:(i + 1) * dim, :] for i in range(count)]


def random_probabilities(k: int, seed=None) -> np.ndarray:
    return make_rng(seed).dirichlet(np.ones(k))
