"""Fidelity, Bures angle, trace distance and Uhlmann-optimal purifications."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import AncillaTooSmall
from .linalg import hermitize, polar_unitary, psd_sqrt, trace_norm
from .states import Purification, as_density, purification_frame, same_dims

BOUND_TOL = 1e-9


def _pair(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    rho = as_density(rho, "rho")
    sigma = as_density(sigma, "sigma")
    same_dims(rho, sigma)
    return rho, sigma


def fidelity(rho, sigma) -> float:
    """Fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` of two density matrices.

    Evaluated as the trace norm of ``sqrt(sigma) sqrt(rho)``, which equals the
    nested form but avoids taking a square root of an already squared-up
    product. Result is clamped to ``[0, 1]``.
    """
    rho, sigma = _pair(rho, sigma)
    f = trace_norm(psd_sqrt(sigma) @ psd_sqrt(rho))
    return float(min(max(f, 0.0), 1.0))


def fidelity_nested(rho, sigma) -> float:
    """The nested square-root form, kept as an independent cross-check of `fidelity`."""
    rho, sigma = _pair(rho, sigma)
    sr = psd_sqrt(rho)
    inner = hermitize(sr @ sigma @ sr)
    f = float(np.trace(psd_sqrt(inner)).real)
    return float(min(max(f, 0.0), 1.0))


def bures_angle(rho, sigma) -> float:
    return float(np.arccos(fidelity(rho, sigma)))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho, sigma = _pair(rho, sigma)
    d = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(rho - sigma)))))
    return min(d, 1.0)


def uhlmann_optimal_purifications(rho, sigma, ancilla_dim: int | None = None
                                  ) -> tuple[Purification, Purification]:
    """Purifications of rho and sigma whose overlap modulus equals their fidelity.

    rho gets its canonical purification ``sqrt(rho) Y`` (see
    `states.purification_frame`). With ``sqrt(sigma) sqrt(rho) = U0 |sqrt(sigma) sqrt(rho)|``
    the partner is ``sqrt(sigma) U0 Y``; its ancilla kets are the rows of
    ``V_H† U0 Y``, i.e. sigma's eigenbasis with the ancilla rotated by U0.
    Under the system-major convention with ``ancilla_dim = dim`` the
    basis-matching unitary between the two factors is the identity.
    """
    rho, sigma = _pair(rho, sigma)
    dim = rho.shape[0]
    anc = dim if ancilla_dim is None else int(ancilla_dim)
    if anc < dim:
        raise AncillaTooSmall(f"ancilla_dim {anc} < dim {dim}")
    sqrt_rho, y = purification_frame(rho, anc)
    sqrt_sigma = psd_sqrt(sigma)
    u0 = polar_unitary(sqrt_sigma, sqrt_rho)
    psi = (sqrt_rho @ y).reshape(-1)
    phi = (sqrt_sigma @ u0 @ y).reshape(-1)
    psi = Purification(dim, anc, psi / np.linalg.norm(psi))
    phi = Purification(dim, anc, phi / np.linalg.norm(phi))
    return psi, phi


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    bures_angle: float
    trace_distance: float
    lower_bound_ok: bool
    upper_bound_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def check_bounds(rho, sigma, tol: float = BOUND_TOL) -> FidelityReport:
    """Check ``1 - F <= D <= sqrt(1 - F^2)`` for a pair of states."""
    f = fidelity(rho, sigma)
    d = trace_distance(rho, sigma)
    return FidelityReport(
        fidelity=f,
        bures_angle=float(np.arccos(f)),
        trace_distance=d,
        lower_bound_ok=bool(1.0 - f <= d + tol),
        upper_bound_ok=bool(d <= np.sqrt(max(1.0 - f * f, 0.0)) + tol),
    )
