import numpy as np
import pytest

from qfid.states import ket, projector


@pytest.fixture
def mixed2():
    return np.eye(2) / 2


@pytest.fixture
def zero2():
    return projector(ket(0, 2))


@pytest.fixture(autouse=True)
def small_cap(monkeypatch):
    # the production cap of 1024 makes rotated sweeps slow; tests opt back in explicitly
    monkeypatch.setenv("QFID_CAP_DIM", "256")


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(log):
        terminalreporter.write_line(log[key])
