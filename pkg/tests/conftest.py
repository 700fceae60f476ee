import numpy as np
import pytest
from hypothesis import settings

from dbar_neumann.conformal import ConformalPair
from dbar_neumann.geometry import annulus, disc

settings.register_profile("ci", max_examples=25, deadline=None)
settings.load_profile("ci")

PERT = [0.0, 1.0, 0.2]  # phi(w) = w + 0.2 w^2


@pytest.fixture(scope="session")
def unit_disc():
    return disc()


@pytest.fixture(scope="session")
def disc256(unit_disc):
    return unit_disc.discretize(256)


@pytest.fixture(scope="session")
def ann():
    return annulus(0.5, 1.0, 0.75)


@pytest.fixture(scope="session")
def ann256(ann):
    return ann.discretize(256)


@pytest.fixture(scope="session")
def pair():
    return ConformalPair(PERT)


@pytest.fixture(scope="session")
def pert(pair):
    return pair.domain()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
