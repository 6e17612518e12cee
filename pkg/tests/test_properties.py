import numpy as np
import pytest

from qfid import properties
from qfid.properties import SUITE_NAMES, run_suite, run_suites


def test_suite_names_unique_and_described():
    assert len(set(SUITE_NAMES)) == len(SUITE_NAMES) == 20
    for s in properties.SUITES:
        assert s.property
        assert not any(w in s.property for w in ("Eq", "Theorem", "Lemma", "Prop"))


@pytest.mark.parametrize("name", SUITE_NAMES)
def test_every_suite_passes_small_run(name):
    res = run_suite(name, seed=7, trials=15)
    assert res.passed, res.violations


def test_trials_are_independent_of_suite_selection():
    alone = run_suite("triangle", seed=3, trials=5).to_dict()
    together = [r.to_dict() for r in run_suites(["symmetry", "triangle"], seed=3, trials=5)]
    assert together[1] == alone


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suites(["nope"], 0, 1)


def test_violation_record_carries_context(monkeypatch):
    class Always:
        def __call__(self, rng):
            return f"value {rng.random():.3f}"

    suite = properties.Suite("demo", "demo property", Always())
    monkeypatch.setattr(properties, "SUITES", properties.SUITES + (suite,))
    monkeypatch.setattr(properties, "SUITE_NAMES", SUITE_NAMES + ("demo",))
    res = run_suite("demo", seed=1, trials=2)
    assert [v.trial for v in res.violations] == [0, 1]
    assert res.to_dict()["violations"][0]["property"] == "demo property"


def test_finite_difference_matches_quadratic():
    from qfid import rand
    from qfid.channels import KrausChannel, convexity_second_derivative
    rng = rand.make_rng(5)
    r1, r2 = rand.random_density(3, seed=rng), rand.random_density(3, seed=rng)
    ch = KrausChannel(rand.random_kraus(3, 3, rng))
    fd = properties.finite_difference_second_derivative(r1, r2, ch)
    assert fd == pytest.approx(convexity_second_derivative(r1, r2, ch), rel=1e-5)
    assert np.isfinite(fd)
