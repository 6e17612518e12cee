"""Randomised property suites over the library's inequalities and identities.

Each suite draws `trials` independent instances; trial ``k`` of suite ``s``
uses the stream ``make_rng(seed, s, k)`` so results do not depend on which
other suites run or in which order. A suite returns the list of violations it
found; an empty list means the property held on every trial.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import rand
from .channels import (Ensemble, KrausChannel, apply_channel, convexity_second_derivative,
                       entanglement_fidelity, entanglement_fidelity_purified,
                       ensemble_average_fidelity)
from .fidelity import (bures_angle, fidelity, fidelity_nested, trace_distance,
                       uhlmann_optimal_purifications)
from .linalg import haar_unitary, hermitize, polar_unitary, trace_norm
from .measurement import (Povm, classical_fidelity, classical_trace_distance,
                          fidelity_optimal_povm, helstrom_povm, induced_distribution)
from .states import Purification, projector, purify

MIN_DIM, MAX_DIM = 2, 16


@dataclass(frozen=True)
class Violation:
    suite: str
    property: str
    trial: int
    detail: str


@dataclass
class SuiteResult:
    suite: str
    property: str
    trials: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"suite": self.suite, "property": self.property, "trials": self.trials,
                "passed": self.passed, "violations": [asdict(v) for v in self.violations]}


# instance samplers ---------------------------------------------------------

def _dim(rng, lo: int = MIN_DIM, hi: int = MAX_DIM) -> int:
    return int(rng.integers(lo, hi + 1))


def _state(rng, dim: int) -> np.ndarray:
    return rand.random_density(dim, int(rng.integers(1, dim + 1)), rng)


def _channel(rng, dim: int) -> KrausChannel:
    return KrausChannel(rand.random_kraus(dim, int(rng.integers(1, 5)), rng))


# individual checks: each returns None or a failure description ---------------

def check_polar_attainment(rng, n_unitaries: int = 50, tol: float = 1e-8):
    dim = _dim(rng)
    a = rand.random_psd(dim, int(rng.integers(1, dim + 1)), seed=rng)
    b = rand.random_psd(dim, int(rng.integers(1, dim + 1)), seed=rng)
    ab = a @ b
    v = polar_unitary(a, b)
    norm = trace_norm(ab)
    t = np.trace(ab @ v.conj().T)
    if abs(t.imag) > tol or abs(t.real - norm) > tol:
        return f"Tr(AB V†)={t:.12g} vs trace norm {norm:.12g} (dim {dim})"
    for _ in range(n_unitaries):
        val = abs(np.trace(ab @ haar_unitary(dim, rng)))
        if val > norm + tol:
            return f"|Tr(AB U)|={val:.12g} exceeds trace norm {norm:.12g}"
    return None


def check_uhlmann(rng, n_alternatives: int = 20, tol: float = 1e-8):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    f = fidelity_nested(rho, sigma)
    psi, phi = uhlmann_optimal_purifications(rho, sigma)
    ov = abs(psi.overlap(phi))
    if abs(ov - f) > tol:
        return f"optimal overlap {ov:.12g} vs fidelity {f:.12g} (dim {dim})"
    base_psi, base_phi = purify(rho, dim), purify(sigma, dim)
    eye = np.eye(dim)
    for _ in range(n_alternatives):
        u = haar_unitary(dim, rng)
        alt = Purification(dim, dim, np.kron(eye, u) @ base_phi.state)
        val = abs(base_psi.overlap(alt))
        if val > f + tol:
            return f"alternative overlap {val:.12g} exceeds fidelity {f:.12g}"
    return None


def check_symmetry(rng, tol: float = 1e-9):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    a, b = fidelity(rho, sigma), fidelity(sigma, rho)
    if abs(a - b) > tol:
        return f"F(rho,sigma)={a:.12g} but F(sigma,rho)={b:.12g}"
    return None


def check_unitary_invariance(rng, tol: float = 1e-9):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    u = haar_unitary(dim, rng)
    a = fidelity(rho, sigma)
    b = fidelity(hermitize(u @ rho @ u.conj().T), hermitize(u @ sigma @ u.conj().T))
    if abs(a - b) > tol:
        return f"F changed from {a:.12g} to {b:.12g} under a unitary"
    return None


def check_identity_of_indiscernibles(rng, tol_f: float = 1e-10, tol_dist: float = 1e-6):
    dim = _dim(rng)
    rho = _state(rng, dim)
    for sigma in (_state(rng, dim), rho.copy()):
        f = fidelity(rho, sigma)
        dist = float(np.linalg.norm(rho - sigma))
        if f > 1 - tol_f and dist >= tol_dist:
            return f"F={f!r} but Frobenius distance {dist:.3g}"
        if dist == 0.0 and f <= 1 - tol_f:
            return f"identical states have F={f!r}"
    return None


def check_triangle(rng, tol: float = 1e-9):
    dim = _dim(rng)
    r, s, t = (_state(rng, dim) for _ in range(3))
    lhs = bures_angle(r, t)
    rhs = bures_angle(r, s) + bures_angle(s, t)
    if lhs > rhs + tol:
        return f"A(r,t)={lhs:.12g} > A(r,s)+A(s,t)={rhs:.12g}"
    return None


def check_fidelity_forms(rng, tol: float = 1e-8):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    a, b = fidelity(rho, sigma), fidelity_nested(rho, sigma)
    if abs(a - b) > tol:
        return f"trace-norm form {a:.12g} vs nested form {b:.12g}"
    return None


def check_monotonicity(rng, tol: float = 1e-8):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    ch = _channel(rng, dim)
    before = fidelity(rho, sigma)
    after = fidelity(apply_channel(ch, rho), apply_channel(ch, sigma))
    if after < before - tol:
        return f"F dropped from {before:.12g} to {after:.12g} through a channel"
    return None


def check_strong_concavity(rng, tol: float = 1e-8):
    dim = _dim(rng)
    k = int(rng.integers(1, 6))
    p, q = rand.random_probabilities(k, rng), rand.random_probabilities(k, rng)
    rhos = [_state(rng, dim) for _ in range(k)]
    sigmas = [_state(rng, dim) for _ in range(k)]
    lhs = fidelity(hermitize(sum(pi * r for pi, r in zip(p, rhos))),
                   hermitize(sum(qi * s for qi, s in zip(q, sigmas))))
    rhs = sum(np.sqrt(pi * qi) * fidelity(r, s) for pi, qi, r, s in zip(p, q, rhos, sigmas))
    if lhs < rhs - tol:
        return f"F(mix)={lhs:.12g} < sum sqrt(p q) F={rhs:.12g}"
    return None


def check_povm_lower_bound(rng, tol: float = 1e-8):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    povm = Povm(rand.random_povm_effects(dim, int(rng.integers(1, 9)), rng))
    cf = classical_fidelity(induced_distribution(rho, povm), induced_distribution(sigma, povm))
    f = fidelity(rho, sigma)
    if cf < f - tol:
        return f"classical fidelity {cf:.12g} below quantum fidelity {f:.12g}"
    return None


def check_optimal_povm(rng, tol: float = 1e-7):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    povm = fidelity_optimal_povm(rho, sigma)
    cf = classical_fidelity(induced_distribution(rho, povm), induced_distribution(sigma, povm))
    f = fidelity(rho, sigma)
    if abs(cf - f) > tol:
        return f"optimal POVM gives {cf:.12g}, fidelity is {f:.12g}"
    return None


def check_trace_distance_povm(rng, tol: float = 1e-8):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    d = trace_distance(rho, sigma)
    povm = Povm(rand.random_povm_effects(dim, int(rng.integers(1, 9)), rng))
    dc = classical_trace_distance(induced_distribution(rho, povm), induced_distribution(sigma, povm))
    if dc > d + tol:
        return f"classical distance {dc:.12g} exceeds trace distance {d:.12g}"
    h = helstrom_povm(rho, sigma)
    dh = classical_trace_distance(induced_distribution(rho, h), induced_distribution(sigma, h))
    if abs(dh - d) > tol:
        return f"Helstrom measurement gives {dh:.12g}, trace distance is {d:.12g}"
    return None


def check_bridge(rng, tol: float = 1e-12):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    povm = Povm(rand.random_povm_effects(dim, int(rng.integers(1, 9)), rng))
    p, q = induced_distribution(rho, povm), induced_distribution(sigma, povm)
    hell = float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))
    two_one_minus_f = 2 * (1 - classical_fidelity(p, q))
    l1 = float(np.sum(np.abs(p - q)))
    if abs(hell - two_one_minus_f) > 1e-10:
        return f"sum (sqrt p - sqrt q)^2 = {hell:.12g} vs 2(1-F) = {two_one_minus_f:.12g}"
    if hell > l1 + tol or abs(l1 - 2 * classical_trace_distance(p, q)) > tol:
        return f"sum (sqrt p - sqrt q)^2 = {hell:.12g} exceeds l1 distance {l1:.12g}"
    return None


def check_fvdg(rng, tol: float = 1e-9):
    dim = _dim(rng)
    rho, sigma = _state(rng, dim), _state(rng, dim)
    f, d = fidelity(rho, sigma), trace_distance(rho, sigma)
    if not 1 - f <= d + tol:
        return f"1-F={1 - f:.12g} > D={d:.12g}"
    if not d <= np.sqrt(max(1 - f * f, 0.0)) + tol:
        return f"D={d:.12g} > sqrt(1-F^2)={np.sqrt(max(1 - f * f, 0.0)):.12g}"
    return None


def check_pure_tightness(rng, tol: float = 1e-9):
    dim = _dim(rng)
    a, b = rand.random_pure(dim, rng), rand.random_pure(dim, rng)
    rho, sigma = projector(a), projector(b)
    f, d = fidelity(rho, sigma), trace_distance(rho, sigma)
    if abs(f - abs(np.vdot(a, b))) > tol:
        return f"pure-state fidelity {f:.12g} vs |<a|b>|={abs(np.vdot(a, b)):.12g}"
    if abs(d - np.sqrt(max(1 - f * f, 0.0))) > tol:
        return f"pure states: D={d:.12g} vs sqrt(1-F^2)={np.sqrt(1 - f * f):.12g}"
    return None


def check_entfid_bound(rng, tol: float = 1e-8):
    dim = _dim(rng, hi=8)
    rho, ch = _state(rng, dim), _channel(rng, dim)
    fe = entanglement_fidelity(rho, ch)
    rhs = fidelity(rho, apply_channel(ch, rho)) ** 2
    if fe > rhs + tol:
        return f"entanglement fidelity {fe:.12g} > F(rho,E(rho))^2={rhs:.12g}"
    return None


def check_entfid_forms(rng, tol: float = 1e-8):
    dim = _dim(rng, hi=8)
    rho, ch = _state(rng, dim), _channel(rng, dim)
    a, b = entanglement_fidelity(rho, ch), entanglement_fidelity_purified(rho, ch)
    if abs(a - b) > tol:
        return f"Kraus form {a:.12g} vs purification form {b:.12g}"
    return None


def finite_difference_second_derivative(rho1, rho2, ch, x: float = 0.5, h: float = 1e-4) -> float:
    """Centered second difference of ``t -> entanglement_fidelity(t rho1 + (1-t) rho2, ch)``.

    Evaluated in extended precision: in doubles the rounding of each value,
    divided by h^2, is already ~1e-8 and swamps small curvatures.
    """
    ld = np.longdouble
    r1 = np.asarray(rho1).astype(np.clongdouble)
    r2 = np.asarray(rho2).astype(np.clongdouble)
    ops = [np.asarray(k).astype(np.clongdouble) for k in ch.kraus_ops]

    def f(t):
        rho = t * r1 + (ld(1) - t) * r2
        # Tr(K rho) = sum_ij K_ij rho_ji
        return sum(abs(np.sum(k * rho.T)) ** 2 for k in ops)

    x, h = ld(x), ld(h)
    return float((f(x + h) - 2 * f(x) + f(x - h)) / (h * h))


def check_convexity(rng, tol_mid: float = 1e-9, rel_fd: float = 1e-5):
    dim = _dim(rng, hi=8)
    rho1, rho2, ch = _state(rng, dim), _state(rng, dim), _channel(rng, dim)
    x0, x1 = sorted(rng.uniform(0, 1, size=2))

    def f(t):
        return entanglement_fidelity(hermitize(t * rho1 + (1 - t) * rho2), ch)

    mid = f(0.5 * (x0 + x1))
    if mid > 0.5 * (f(x0) + f(x1)) + tol_mid:
        return f"midpoint value {mid:.12g} above chord {(f(x0) + f(x1)) / 2:.12g}"
    closed = convexity_second_derivative(rho1, rho2, ch)
    if closed < -1e-12:
        return f"closed-form second derivative {closed:.3g} is negative"
    fd = finite_difference_second_derivative(rho1, rho2, ch)
    if abs(fd - closed) > rel_fd * abs(closed) + 1e-12:
        return f"closed form {closed:.12g} vs finite difference {fd:.12g}"
    return None


def check_ensemble_bound(rng, tol: float = 1e-8):
    dim = _dim(rng, hi=8)
    k = int(rng.integers(1, 7))
    ens = Ensemble(rand.random_probabilities(k, rng), tuple(_state(rng, dim) for _ in range(k)))
    ch = _channel(rng, dim)
    lhs = entanglement_fidelity(ens.average(), ch)
    mid = sum(p * entanglement_fidelity(s, ch) for p, s in zip(ens.weights, ens.states))
    fbar = ensemble_average_fidelity(ens, ch)
    if lhs > mid + tol:
        return f"F(sum p rho, E)={lhs:.12g} > sum p F(rho, E)={mid:.12g}"
    if lhs > fbar + tol:
        return f"F(sum p rho, E)={lhs:.12g} > ensemble average fidelity {fbar:.12g}"
    return None


def check_kraus_invariance(rng, tol: float = 1e-9):
    dim = _dim(rng, hi=8)
    rho, ch = _state(rng, dim), _channel(rng, dim)
    k = len(ch.kraus_ops)
    w = rand.random_isometry(k + int(rng.integers(0, 3)), k, rng)
    a, b = entanglement_fidelity(rho, ch), entanglement_fidelity(rho, ch.remix(w))
    if abs(a - b) > tol:
        return f"remixed Kraus set changes entanglement fidelity {a:.12g} -> {b:.12g}"
    return None


@dataclass(frozen=True)
class Suite:
    name: str
    property: str
    check: Callable


SUITES = (
    Suite("polar", "trace norm attained by the polar unitary of a PSD product", check_polar_attainment),
    Suite("uhlmann", "Uhlmann's theorem: fidelity is the maximal purification overlap", check_uhlmann),
    Suite("symmetry", "fidelity symmetry", check_symmetry),
    Suite("unitary-invariance", "fidelity unitary invariance", check_unitary_invariance),
    Suite("indiscernibles", "fidelity equals one only for equal states", check_identity_of_indiscernibles),
    Suite("triangle", "Bures angle triangle inequality", check_triangle),
    Suite("fidelity-forms", "trace-norm and nested square-root fidelity agree", check_fidelity_forms),
    Suite("monotonicity", "fidelity monotonicity under channels", check_monotonicity),
    Suite("strong-concavity", "strong concavity of the fidelity", check_strong_concavity),
    Suite("povm-lower-bound", "fidelity is a lower bound on measured classical fidelity",
          check_povm_lower_bound),
    Suite("optimal-povm", "eigenbasis of M attains the fidelity", check_optimal_povm),
    Suite("trace-distance-povm", "trace distance is the maximal measured distance (Helstrom)",
          check_trace_distance_povm),
    Suite("bridge", "sum (sqrt p - sqrt q)^2 = 2(1 - F) <= 2 D for distributions", check_bridge),
    Suite("fvdg", "1 - F <= D <= sqrt(1 - F^2)", check_fvdg),
    Suite("pure-tightness", "D = sqrt(1 - F^2) for pure states", check_pure_tightness),
    Suite("entfid-bound", "entanglement fidelity <= F(rho, E(rho))^2", check_entfid_bound),
    Suite("entfid-forms", "Kraus and purification forms of entanglement fidelity agree",
          check_entfid_forms),
    Suite("convexity", "entanglement fidelity is convex in the state", check_convexity),
    Suite("ensemble-bound", "entanglement fidelity of the average <= ensemble average fidelity",
          check_ensemble_bound),
    Suite("kraus-invariance", "entanglement fidelity is independent of the Kraus representation",
          check_kraus_invariance),
)

SUITE_NAMES = tuple(s.name for s in SUITES)


def run_suite(name: str, seed: int, trials: int) -> SuiteResult:
    idx = SUITE_NAMES.index(name)
    suite = SUITES[idx]
    result = SuiteResult(suite.name, suite.property, trials)
    for k in range(trials):
        detail = suite.check(rand.make_rng(seed, idx, k))
        if detail is not None:
            result.violations.append(Violation(suite.name, suite.property, k, detail))
    return result


def run_suites(names, seed: int, trials: int) -> list[SuiteResult]:
    if names in ("all", None):
        names = SUITE_NAMES
    unknown = [n for n in names if n not in SUITE_NAMES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    return [run_suite(n, seed, trials) for n in names]
