import numpy as np
import pytest

from qcf.potential import LennardJones, default_radii
from qcf.sampling import rng as make_rng


@pytest.fixture
def rng():
    return make_rng()


@pytest.fixture(scope="session")
def lj():
    return LennardJones()


@pytest.fixture(scope="session")
def radii(lj):
    return default_radii(lj)


def pytest_report_header(config):
    from qcf.sampling import seed_from_env

    return f"QCF_SEED={seed_from_env()}"


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
