"""Kraus channels, entanglement fidelity and ensemble average fidelity."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatch, InvalidChannel, InvalidParameter
from .fidelity import fidelity
from .linalg import hermitize
from .states import as_density, purify

TOL_COMPLETE = 1e-8


class KrausChannel:
    """Completely positive trace-preserving map ``rho -> sum_i E_i rho E_i†``."""

    def __init__(self, kraus_ops: Sequence, check: bool = True):
        self.kraus_ops = tuple(np.asarray(k, dtype=complex) for k in kraus_ops)
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"KrausChannel(<{len(self.kraus_ops)} operators, dim {self.dim}>)"

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    def validate(self) -> None:
        if not self.kraus_ops:
            raise InvalidChannel("channel has no Kraus operators")
        d = self.kraus_ops[0].shape
        if len(d) != 2 or d[0] != d[1]:
            raise InvalidChannel(f"Kraus operators must be square, got {d}")
        total = np.zeros(d, dtype=complex)
        for i, k in enumerate(self.kraus_ops):
            if k.shape != d:
                raise InvalidChannel(f"Kraus operator {i} has shape {k.shape}, expected {d}")
            total += k.conj().T @ k
        dev = np.max(np.abs(total - np.eye(d[0])))
        if dev > TOL_COMPLETE:
            raise InvalidChannel(f"sum E_i† E_i deviates from identity by {dev:.3g}")

    def remix(self, isometry: np.ndarray) -> "KrausChannel":
        """Equivalent Kraus set ``F_j = sum_i W_ji E_i`` for an isometry W (``W† W = I``)."""
        w = np.asarray(isometry, dtype=complex)
        if w.shape[1] != len(self.kraus_ops):
            raise DimMismatch(f"isometry has {w.shape[1]} columns for {len(self.kraus_ops)} operators")
        stack = np.stack(self.kraus_ops)
        return KrausChannel(np.tensordot(w, stack, axes=(1, 0)))

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


@dataclass(frozen=True)
class Ensemble:
    """Finite ensemble ``{p_j, rho_j}``."""

    weights: np.ndarray
    states: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        states = tuple(as_density(s, f"states[{j}]") for j, s in enumerate(self.states))
        if len(states) != w.size or not states:
            raise InvalidParameter(f"{w.size} weights for {len(states)} states")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-8:
            raise InvalidParameter("ensemble weights must be a probability vector")
        if len({s.shape for s in states}) != 1:
            raise DimMismatch("ensemble states have different dimensions")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    def average(self) -> np.ndarray:
        return hermitize(sum(p * s for p, s in zip(self.weights, self.states)))


def _check_dims(ch: KrausChannel, rho: np.ndarray) -> None:
    if rho.shape[0] != ch.dim:
        raise DimMismatch(f"state has dim {rho.shape[0]}, channel acts on dim {ch.dim}")


def apply_channel(ch: KrausChannel, rho) -> np.ndarray:
    rho = as_density(rho)
    _check_dims(ch, rho)
    return hermitize(sum(k @ rho @ k.conj().T for k in ch.kraus_ops))


def entanglement_fidelity(rho, ch: KrausChannel) -> float:
    """``sum_i |Tr(E_i rho)|^2``; independent of the Kraus representation."""
    rho = as_density(rho)
    _check_dims(ch, rho)
    return float(sum(abs(np.trace(k @ rho)) ** 2 for k in ch.kraus_ops))


def entanglement_fidelity_purified(rho, ch: KrausChannel) -> float:
    """``<psi| (E ⊗ I)(|psi><psi|) |psi>`` with psi the canonical purification of rho.

    The channel acts on the system (first) tensor factor. Used as an
    independent check of `entanglement_fidelity`.
    """
    rho = as_density(rho)
    _check_dims(ch, rho)
    psi = purify(rho)
    eye = np.eye(psi.ancilla_dim)
    out = np.zeros((psi.state.size,) * 2, dtype=complex)
    for k in ch.kraus_ops:
        v = np.kron(k, eye) @ psi.state
        out += np.outer(v, v.conj())
    return float(np.vdot(psi.state, out @ psi.state).real)


def ensemble_average_fidelity(ens: Ensemble, ch: KrausChannel) -> float:
    """``sum_j p_j F(rho_j, E(rho_j))^2``."""
    total = 0.0
    for p, s in zip(ens.weights, ens.states):
        total += p * fidelity(s, apply_channel(ch, s)) ** 2
    return float(total)


def convexity_second_derivative(rho1, rho2, ch: KrausChannel) -> float:
    """Second derivative of ``x -> entanglement_fidelity(x rho1 + (1-x) rho2, ch)``.

    The map is a quadratic ``sum_i |b_i + x (a_i - b_i)|^2``, so the
    derivative is constant in x and equals ``2 sum_i |Tr((rho1 - rho2) E_i)|^2``.
    """
    rho1 = as_density(rho1, "rho1")
    rho2 = as_density(rho2, "rho2")
    _check_dims(ch, rho1)
    _check_dims(ch, rho2)
    diff = rho1 - rho2
    return float(2.0 * sum(abs(np.trace(diff @ k)) ** 2 for k in ch.kraus_ops))


# named channels -----------------------------------------------------------

def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim)])


def dephasing(p: float, dim: int = 2) -> KrausChannel:
    """``(1-p) rho + p diag(rho)``."""
    _prob(p)
    ops = [np.sqrt(1 - p) * np.eye(dim)] if p < 1 else []
    for j in range(dim):
        e = np.zeros((dim, dim))
        e[j, j] = np.sqrt(p)
        ops.append(e)
    return KrausChannel(ops)


def _clock(dim: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))


def _shift(dim: int) -> np.ndarray:
    return np.roll(np.eye(dim), 1, axis=0)


def phase_flip(p: float, dim: int = 2) -> KrausChannel:
    """Kraus set ``{sqrt(1-p) I, sqrt(p) Z}``; Z is the clock matrix for dim > 2."""
    _prob(p)
    return KrausChannel([np.sqrt(1 - p) * np.eye(dim), np.sqrt(p) * _clock(dim)])


def depolarizing(p: float, dim: int = 2) -> KrausChannel:
    """``(1-p) rho + p I/dim`` written with the dim^2 Weyl operators."""
    _prob(p)
    x, z = _shift(dim), _clock(dim)
    ops = []
    for a in range(dim):
        for b in range(dim):
            w = np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)
            c = 1 - p + p / dim**2 if a == b == 0 else p / dim**2
            ops.append(np.sqrt(c) * w)
    return KrausChannel(ops)


def amplitude_damping(gamma: float, dim: int = 2) -> KrausChannel:
    """Each excited level decays to level 0 with probability gamma."""
    _prob(gamma)
    k0 = np.diag([1.0] + [np.sqrt(1 - gamma)] * (dim - 1))
    ops = [k0]
    for j in range(1, dim):
        e = np.zeros((dim, dim))
        e[0, j] = np.sqrt(gamma)
        ops.append(e)
    return KrausChannel(ops)


def _prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"channel parameter must lie in [0, 1], got {p}")


CHANNELS = {
    "identity": lambda dim: identity_channel(dim),
    "dephasing": dephasing,
    "phase-flip": phase_flip,
    "depolarizing": depolarizing,
    "amplitude-damping": amplitude_damping,
}

_SPEC = re.compile(r"^\s*([a-z\-]+)\s*(?:[:(]\s*([^)]*?)\s*\)?)?\s*$")


def channel_from_string(spec: str, dim: int) -> KrausChannel:
    """Build a named channel from ``"name"``, ``"name(p)"`` or ``"name:p"``."""
    m = _SPEC.match(spec)
    if not m or m.group(1) not in CHANNELS:
        raise InvalidParameter(f"unknown channel {spec!r}; known: {', '.join(CHANNELS)}")
    name, arg = m.group(1), m.group(2)
    if name == "identity":
        if arg:
            raise InvalidParameter("identity takes no parameter")
        return identity_channel(dim)
    if not arg:
        raise InvalidParameter(f"channel {name!r} needs a parameter, e.g. {name}(0.1)")
    try:
        value = float(arg)
    except ValueError:
        raise InvalidParameter(f"bad parameter {arg!r} for {name}") from None
    return CHANNELS[name](value, dim)
