from __future__ import annotations

import numpy as np
import pytest

from fatfront import analysis
from fatfront.discretization import Bump, Grid1D
from fatfront.integrator import SimulationRun, StepperConfig, run
from fatfront.kernels import catalog
from fatfront.reaction import Logistic

CATALOG = catalog()
FAT_TAILED = ["fig1", "fig2a", "log_sublinear"]


def _simulate(kernel, L, dx, t_max, every):
    times = tuple(np.round(np.arange(0.0, t_max + 1e-9, every), 12))
    sim = SimulationRun(kernel, Logistic(), Grid1D.from_spacing(L, dx),
                        StepperConfig(t_max, snapshot_times=times), Bump(10.0))
    run(sim)
    assert sim.status == "completed"
    return sim


@pytest.fixture(scope="session")
def catalog_kernels():
    return CATALOG


@pytest.fixture(scope="session")
def fig1_run():
    return _simulate(CATALOG["fig1"], 2500.0, 0.5, 30.0, 1.0)


@pytest.fixture(scope="session")
def fig1_fine_run():
    return _simulate(CATALOG["fig1"], 2500.0, 0.25, 30.0, 1.0)


@pytest.fixture(scope="session")
def fig2a_run():
    L = analysis.recommend_domain(CATALOG["fig2a"], Logistic(), 12.0, lambda_min=0.05)
    return _simulate(CATALOG["fig2a"], L, 1.0, 12.0, 0.25)


@pytest.fixture(scope="session")
def fig2b_run():
    return _simulate(CATALOG["fig2b"], 400.0, 0.5, 40.0, 0.5)


@pytest.fixture(scope="session")
def stretched_long_run():
    return _simulate(CATALOG["fig1"], 14000.0, 1.0, 90.0, 1.0)


@pytest.fixture(scope="session")
def log_sublinear_run():
    return _simulate(CATALOG["log_sublinear"], 3000.0, 1.0, 30.0, 0.5)


# PASS/FAIL lines from test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
