import numpy as np
import pytest

from qfid.errors import InvalidParameter, NoConvergence
from qfid.fidelity import fidelity
from qfid.truncation import (CSV_HEADER, SpectralStateGenerator, default_cap_dim,
                             diagonal_fidelity_limit, epsilon_schedule, generator_from_string,
                             limit_fidelity, materialize, pairwise_rotation,
                             truncated_fidelity_sweep, truncation_terms)

G_HALF = SpectralStateGenerator.geometric(0.5)
G_THIRD = SpectralStateGenerator.geometric(1 / 3)
DIMS = (4, 8, 16, 32, 64)


def test_materialize_examples():
    np.testing.assert_allclose(materialize(G_HALF, 2), np.diag([2 / 3, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(materialize(SpectralStateGenerator.geometric(1e-6), 1), [[1.0]])
    custom = SpectralStateGenerator.custom([0.25, 0.75])
    np.testing.assert_allclose(materialize(custom, 2), np.diag([0.25, 0.75]))


def test_generator_parameter_errors():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(InvalidParameter):
            SpectralStateGenerator.geometric(bad)
    with pytest.raises(InvalidParameter):
        SpectralStateGenerator.power(1.0)
    with pytest.raises(InvalidParameter):
        SpectralStateGenerator.custom([0.5, 0.6])
    with pytest.raises(InvalidParameter):
        materialize(G_HALF, 0)


def test_geometric_tail_mass_is_exact():
    for n in (1, 5, 20):
        assert 1 - G_HALF.mass(n) == pytest.approx(0.5 ** n, abs=1e-15)
        assert np.sum(G_HALF.weights(n)) == pytest.approx(G_HALF.mass(n), abs=1e-12)


def test_power_generator_normalised_at_cap():
    g = SpectralStateGenerator.power(2.0, cap_dim=50)
    assert g.mass(50) == pytest.approx(1.0, abs=1e-12)
    assert g.mass(80) == pytest.approx(1.0, abs=1e-12)
    assert g.weights(60)[55] == 0.0


def test_diagonal_closed_form_matches_materialised():
    closed = diagonal_fidelity_limit(G_HALF, G_THIRD)
    p, q = G_HALF.weights(200), G_THIRD.weights(200)
    assert closed == pytest.approx(np.sum(np.sqrt(p * q)), abs=1e-12)
    for n in (8, 32):
        pn, qn = p[:n] / p[:n].sum(), q[:n] / q[:n].sum()
        assert fidelity(materialize(G_HALF, n), materialize(G_THIRD, n)) == pytest.approx(
            np.sum(np.sqrt(pn * qn)), abs=1e-9)


def test_sweep_identical_generators():
    rep = truncated_fidelity_sweep(G_HALF, G_HALF, (2, 4, 8))
    np.testing.assert_allclose(rep.column("fidelity_n"), 1.0, atol=1e-12)
    np.testing.assert_allclose(rep.column("gap_to_limit"), 0.0, atol=1e-12)
    np.testing.assert_allclose(rep.column("povm_gap"), 0.0, atol=1e-9)


def test_sweep_geometric_pair_converges():
    rep = truncated_fidelity_sweep(G_HALF, G_THIRD, DIMS)
    f = rep.column("fidelity_n")
    assert abs(f[-1] - f[-2]) < 1e-6
    assert rep.limit == pytest.approx(diagonal_fidelity_limit(G_HALF, G_THIRD))
    assert np.all(np.diff(rep.column("alpha_n")) >= 0)
    assert np.all(np.diff(rep.column("beta_n")) >= 0)
    gaps = rep.column("povm_gap")
    assert np.all(gaps >= -1e-9) and np.all(np.diff(gaps) <= 1e-9)
    assert np.all(np.diff(rep.column("gap_to_limit")) <= 1e-9)


def test_sweep_rotated_pair_converges():
    rotated = SpectralStateGenerator.geometric(0.5, rotation=pairwise_rotation(0.4))
    rep = truncated_fidelity_sweep(G_HALF, rotated, (4, 8, 16, 32), cap_dim=128)
    assert rep.column("gap_to_limit")[-1] < 1e-6
    assert rep.limit < 1 - 1e-3
    assert np.all(rep.column("povm_gap") >= -1e-9)


def test_sweep_rejects_unsorted_dims():
    with pytest.raises(InvalidParameter):
        truncated_fidelity_sweep(G_HALF, G_THIRD, (8, 4))


def test_csv_output():
    text = truncated_fidelity_sweep(G_HALF, G_THIRD, (2, 4)).to_csv()
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 3 and lines[1].startswith("2,")


def test_epsilon_schedule_examples():
    assert epsilon_schedule(G_HALF, G_HALF, 1e-9) == 1
    assert epsilon_schedule(G_HALF, G_THIRD, 2.0) == 1
    ns = [epsilon_schedule(G_HALF, G_THIRD, eps) for eps in (1e-1, 1e-3, 1e-6)]
    assert ns == sorted(ns)
    assert ns[1] < default_cap_dim()


def test_epsilon_schedule_reverifies():
    for eps in (1e-2, 1e-4, 1e-7):
        n = epsilon_schedule(G_HALF, G_THIRD, eps)
        assert truncation_terms(G_HALF, G_THIRD, n).gap < eps
        n = epsilon_schedule(G_HALF, G_THIRD, eps, criterion="split")
        t = truncation_terms(G_HALF, G_THIRD, n)
        assert t.head < eps / 2 and t.tail < eps / 2


def test_epsilon_schedule_gap_matches_lifted_povm():
    from qfid.measurement import lifted_truncation_povm
    rho, sigma = materialize(G_HALF, 64), materialize(G_THIRD, 64)
    for n in (4, 8):
        t = truncation_terms(G_HALF, G_THIRD, n)
        assert t.gap == pytest.approx(lifted_truncation_povm(rho, sigma, n).gap, abs=1e-9)


def test_epsilon_schedule_hits_cap():
    with pytest.raises(NoConvergence):
        epsilon_schedule(SpectralStateGenerator.geometric(0.99), G_THIRD, 1e-12, cap_dim=16)
    with pytest.raises(InvalidParameter):
        epsilon_schedule(G_HALF, G_THIRD, 0.0)


def test_cap_dim_from_environment(monkeypatch):
    monkeypatch.setenv("QFID_CAP_DIM", "64")
    assert default_cap_dim() == 64
    monkeypatch.delenv("QFID_CAP_DIM")
    assert default_cap_dim() == 1024
    monkeypatch.setenv("QFID_CAP_DIM", "lots")
    with pytest.raises(InvalidParameter):
        default_cap_dim()


def test_generator_from_string():
    assert generator_from_string("geometric:0.5") == G_HALF
    assert generator_from_string("power:2", cap_dim=10).cap_dim == 10
    assert generator_from_string("custom:0.25,0.75").values == (0.25, 0.75)
    assert generator_from_string("geometric:0.5", rotation_angle=0.3).rotation is not None
    for bad in ("geometric:x", "zeta:2", "power:0.5"):
        with pytest.raises(InvalidParameter):
            generator_from_string(bad)


def test_limit_for_rotated_pair_uses_cap():
    rotated = SpectralStateGenerator.geometric(0.5, rotation=pairwise_rotation(0.4))
    expected = fidelity(materialize(G_HALF, 64), materialize(rotated, 64))
    assert limit_fidelity(G_HALF, rotated, 64) == pytest.approx(expected, abs=1e-12)
