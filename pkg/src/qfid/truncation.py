"""Diagonal states on a countable basis and their finite truncations.

A `SpectralStateGenerator` stands for ``rho = sum_i p_i |i><i|`` with an
infinite probability sequence. `materialize` keeps the first n weights,
renormalises by the captured mass ``alpha_n`` and optionally rotates the
result. Sweeps over n show how truncated fidelities and the lifted
measurement of `measurement.lifted_truncation_povm` approach their limits.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidParameter, InvalidTruncation, NoConvergence
from .fidelity import fidelity
from .linalg import hermitize, spectral_decomposition
from .measurement import MIN_TRUNC_MASS, lifted_truncation_povm

DEFAULT_CAP_DIM = 1024
CSV_HEADER = ("trunc_dim", "alpha_n", "beta_n", "fidelity_n", "gap_to_limit", "povm_gap")


def default_cap_dim() -> int:
    """Convergence cap, overridable through the ``QFID_CAP_DIM`` environment variable."""
    raw = os.environ.get("QFID_CAP_DIM")
    if raw is None:
        return DEFAULT_CAP_DIM
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidParameter(f"QFID_CAP_DIM must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InvalidParameter("QFID_CAP_DIM must be positive")
    return cap


def pairwise_rotation(theta: float) -> Callable[[int], np.ndarray]:
    """Rotation by `theta` inside each pair of basis states ``(0,1), (2,3), ...``.

    The same angle is used at every dimension, so the rotations at different
    truncation sizes agree on their common even-sized prefix and leave the
    span of that prefix invariant. A trailing odd index is left alone.
    """
    c, s = np.cos(theta), np.sin(theta)

    def build(dim: int) -> np.ndarray:
        u = np.eye(dim, dtype=complex)
        for i in range(0, dim - 1, 2):
            u[i:i + 2, i:i + 2] = [[c, -s], [s, c]]
        return u

    build.theta = theta
    return build


@dataclass(frozen=True)
class SpectralStateGenerator:
    """Probability sequence over a countable basis.

    kind is ``"geometric"`` (``p_i = (1-lam) lam^i``), ``"power"``
    (``p_i ∝ (i+1)^-s``, normalised by the partial sum over the first
    ``cap_dim`` terms and zero beyond), or ``"custom"`` (explicit finite
    list, zero beyond). `rotation` maps a dimension to a unitary applied
    after truncation.
    """

    kind: str
    param: float = 0.0
    values: tuple = ()
    rotation: Callable[[int], np.ndarray] | None = field(default=None, compare=False)
    cap_dim: int = 0

    def __post_init__(self):
        if self.kind == "geometric":
            if not 0.0 < self.param < 1.0:
                raise InvalidParameter(f"geometric ratio must lie in (0, 1), got {self.param}")
        elif self.kind == "power":
            if not self.param > 1.0:
                raise InvalidParameter(f"power exponent must exceed 1, got {self.param}")
            if self.cap_dim <= 0:
                object.__setattr__(self, "cap_dim", default_cap_dim())
        elif self.kind == "custom":
            vals = np.asarray(self.values, dtype=float).reshape(-1)
            if vals.size == 0 or np.any(vals < 0) or abs(vals.sum() - 1.0) > 1e-10:
                raise InvalidParameter("custom weights must be a nonempty probability vector")
            object.__setattr__(self, "values", tuple(vals / vals.sum()))
        else:
            raise InvalidParameter(f"unknown generator kind {self.kind!r}")

    @classmethod
    def geometric(cls, lam: float, rotation=None) -> "SpectralStateGenerator":
        return cls("geometric", float(lam), rotation=rotation)

    @classmethod
    def power(cls, s: float, cap_dim: int | None = None, rotation=None) -> "SpectralStateGenerator":
        return cls("power", float(s), rotation=rotation, cap_dim=cap_dim or 0)

    @classmethod
    def custom(cls, weights: Sequence[float], rotation=None) -> "SpectralStateGenerator":
        return cls("custom", values=tuple(float(w) for w in weights), rotation=rotation)

    def weights(self, n: int) -> np.ndarray:
        """The first n entries of the (unrenormalised) sequence."""
        i = np.arange(n, dtype=float)
        if self.kind == "geometric":
            return (1.0 - self.param) * self.param ** i
        if self.kind == "power":
            norm = np.sum(np.arange(1, self.cap_dim + 1, dtype=float) ** -self.param)
            w = (i + 1) ** -self.param / norm
            w[self.cap_dim:] = 0.0
            return w
        out = np.zeros(n)
        m = min(n, len(self.values))
        out[:m] = self.values[:m]
        return out

    def mass(self, n: int) -> float:
        """Captured mass ``alpha_n`` of the first n weights."""
        if self.kind == "geometric":
            return 1.0 - self.param ** n
        return float(np.sum(self.weights(n)))

    def tail(self, n: int) -> float:
        if self.kind == "geometric":
            return self.param ** n
        return 1.0 - self.mass(n)


def materialize(gen: SpectralStateGenerator, dim: int) -> np.ndarray:
    """Density matrix of the first `dim` weights renormalised to unit trace, then rotated."""
    if dim < 1:
        raise InvalidParameter(f"dim must be positive, got {dim}")
    w = gen.weights(dim)
    alpha = w.sum()
    if alpha < MIN_TRUNC_MASS:
        raise InvalidTruncation(f"first {dim} weights carry mass {alpha:.3g}")
    rho = np.diag(w / alpha).astype(complex)
    if gen.rotation is not None:
        u = np.asarray(gen.rotation(dim), dtype=complex)
        rho = hermitize(u @ rho @ u.conj().T)
    return rho


def diagonal_fidelity_limit(g1: SpectralStateGenerator, g2: SpectralStateGenerator,
                            cap_dim: int | None = None) -> float:
    """``sum_i sqrt(p_i q_i)`` over the full sequences, ignoring rotations.

    Two geometric sequences use the geometric-series closed form; any other
    pair has at least one sequence that vanishes past a finite index (custom
    length or power cap), or is summed to `cap_dim`.
    """
    if g1.kind == g2.kind == "geometric":
        l1, l2 = g1.param, g2.param
        return float(np.sqrt((1 - l1) * (1 - l2)) / (1 - np.sqrt(l1 * l2)))
    cap = cap_dim or default_cap_dim()
    n = cap
    for g in (g1, g2):
        if g.kind == "custom":
            n = min(n, len(g.values))
        elif g.kind == "power":
            n = min(n, g.cap_dim)
    return float(np.sum(np.sqrt(g1.weights(n) * g2.weights(n))))


def _commuting(g1: SpectralStateGenerator, g2: SpectralStateGenerator) -> bool:
    return g1.rotation is None and g2.rotation is None


def limit_fidelity(g1: SpectralStateGenerator, g2: SpectralStateGenerator,
                   cap_dim: int | None = None) -> float:
    """Reference value for the untruncated fidelity.

    Exact series for unrotated pairs; otherwise the fidelity of the two
    states materialised at the cap dimension.
    """
    cap = cap_dim or default_cap_dim()
    if _commuting(g1, g2):
        return diagonal_fidelity_limit(g1, g2, cap)
    return fidelity(materialize(g1, cap), materialize(g2, cap))


@dataclass(frozen=True)
class ConvergenceRow:
    trunc_dim: int
    alpha_n: float
    beta_n: float
    fidelity_n: float
    gap_to_limit: float
    povm_gap: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple
    limit: float

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.trunc_dim] + [repr(float(getattr(r, c))) for c in CSV_HEADER[1:]])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"limit": self.limit,
                "rows": [{c: getattr(r, c) for c in CSV_HEADER} for r in self.rows]}


def truncated_fidelity_sweep(g1: SpectralStateGenerator, g2: SpectralStateGenerator,
                             dims: Iterable[int], cap_dim: int | None = None) -> ConvergenceReport:
    """Fidelity of materialised truncations and lifted-POVM gaps for each n in `dims`.

    The lifted POVM is built on both states materialised at ``max(dims)``,
    which plays the role of the untruncated pair.
    """
    dims = [int(n) for n in dims]
    if not dims or any(b <= a for a, b in zip(dims, dims[1:])) or dims[0] < 1:
        raise InvalidParameter(f"dims must be strictly ascending positive integers, got {dims}")
    limit = limit_fidelity(g1, g2, cap_dim)
    big = dims[-1]
    rho_big, sigma_big = materialize(g1, big), materialize(g2, big)
    rows = []
    for n in dims:
        f_n = fidelity(materialize(g1, n), materialize(g2, n))
        lifted = lifted_truncation_povm(rho_big, sigma_big, n)
        rows.append(ConvergenceRow(
            trunc_dim=n, alpha_n=g1.mass(n), beta_n=g2.mass(n), fidelity_n=f_n,
            gap_to_limit=abs(f_n - limit), povm_gap=lifted.gap))
    return ConvergenceReport(rows=tuple(rows), limit=limit)


@dataclass(frozen=True)
class TruncationTerms:
    """Quantities entering the lifted-measurement error at truncation size n.

    ``head = |F - alpha beta F_n|`` and ``tail`` is the contribution of the
    completing effect ``F_0``; ``gap = alpha beta F_n + tail - F`` is the
    exact excess of the lifted POVM's classical fidelity over F.
    """

    n: int
    alpha: float
    beta: float
    truncated_fidelity: float
    limit: float
    head: float
    tail: float
    gap: float


class _TermSource:
    """Computes `TruncationTerms` for one generator pair at any n."""

    def __init__(self, g1, g2, cap: int):
        self.g1, self.g2, self.cap = g1, g2, cap
        self.limit = limit_fidelity(g1, g2, cap)
        if not _commuting(g1, g2):
            # compress the cap-dimension states onto rho's leading eigenvectors
            self.rho = materialize(g1, cap)
            self.sigma = materialize(g2, cap)
            self.vecs = spectral_decomposition(self.rho).eigenvectors[:, ::-1]

    def terms(self, n: int) -> TruncationTerms:
        if _commuting(self.g1, self.g2):
            a, b = self.g1.mass(n), self.g2.mass(n)
            f_n = fidelity(materialize(self.g1, n), materialize(self.g2, n))
        else:
            vn = self.vecs[:, :n]
            rc = hermitize(vn.conj().T @ self.rho @ vn)
            sc = hermitize(vn.conj().T @ self.sigma @ vn)
            a, b = float(np.trace(rc).real), float(np.trace(sc).real)
            if min(a, b) < MIN_TRUNC_MASS:
                raise InvalidTruncation(f"truncated mass too small at n={n}")
            f_n = fidelity(rc / a, sc / b)
        root = np.sqrt(a * b)
        tail = float(np.sqrt(max(1 - root * a, 0.0) * max(1 - root * b, 0.0)))
        head_val = a * b * f_n
        return TruncationTerms(n=n, alpha=a, beta=b, truncated_fidelity=f_n, limit=self.limit,
                               head=abs(self.limit - head_val), tail=tail,
                               gap=head_val + tail - self.limit)


def truncation_terms(g1: SpectralStateGenerator, g2: SpectralStateGenerator, n: int,
                     cap_dim: int | None = None) -> TruncationTerms:
    return _TermSource(g1, g2, cap_dim or default_cap_dim()).terms(n)


def _doubling(cap: int) -> list[int]:
    ns, n = [], 1
    while n < cap:
        ns.append(n)
        n *= 2
    ns.append(cap)
    return ns


def epsilon_schedule(g1: SpectralStateGenerator, g2: SpectralStateGenerator, eps: float,
                     cap_dim: int | None = None, criterion: str = "gap") -> int:
    """Smallest n in the doubling sequence 1, 2, 4, ..., cap whose lifted POVM is eps-optimal.

    With ``criterion="gap"`` the test is ``gap < eps`` using the exact
    decomposition ``gap = alpha beta F_n + tail - F``. With ``"split"`` it is
    the stricter sufficient condition ``head < eps/2 and tail < eps/2``.
    Raises NoConvergence if the cap is reached without meeting the test.
    """
    if not eps > 0:
        raise InvalidParameter(f"eps must be positive, got {eps}")
    if criterion not in ("gap", "split"):
        raise InvalidParameter(f"criterion must be 'gap' or 'split', got {criterion!r}")
    cap = cap_dim or default_cap_dim()
    src = _TermSource(g1, g2, cap)
    for n in _doubling(cap):
        t = src.terms(n)
        ok = t.gap < eps if criterion == "gap" else (t.head < eps / 2 and t.tail < eps / 2)
        if ok:
            return n
    raise NoConvergence(f"eps={eps:g} not reached by dimension {cap}")


def generator_from_string(spec: str, rotation_angle: float | None = None,
                          cap_dim: int | None = None) -> SpectralStateGenerator:
    """Parse ``geometric:0.5``, ``power:2`` or ``custom:0.25,0.75``."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    rot = pairwise_rotation(rotation_angle) if rotation_angle else None
    try:
        if kind == "geometric":
            return SpectralStateGenerator.geometric(float(arg), rotation=rot)
        if kind == "power":
            return SpectralStateGenerator.power(float(arg), cap_dim=cap_dim, rotation=rot)
        if kind == "custom":
            return SpectralStateGenerator.custom([float(x) for x in arg.split(",")], rotation=rot)
    except ValueError as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise InvalidParameter(f"bad generator parameter in {spec!r}") from None
    raise InvalidParameter(f"unknown generator {spec!r}; use geometric:, power: or custom:")
