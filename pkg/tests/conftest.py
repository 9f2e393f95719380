import time
from pathlib import Path

import numpy as np
import pytest

from mpckit import (CostWeights, HPolyhedron, MpcConfig, double_integrator, max_stabilizing_set,
                    solve_dare)

DATA = Path(__file__).parent / "data"
SESSION_START = time.perf_counter()
_ACCEPTANCE_LINES = []


def pytest_collection_modifyitems(config, items):
    # the wall-clock criterion has to see the rest of the session
    last = [it for it in items if it.get_closest_marker("run_last")]
    rest = [it for it in items if not it.get_closest_marker("run_last")]
    items[:] = rest + last


def pytest_configure(config):
    config.addinivalue_line("markers", "run_last: run after every other test")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


@pytest.fixture
def session_elapsed():
    return lambda: time.perf_counter() - SESSION_START


# double integrator example data

@pytest.fixture(scope="session")
def di():
    return double_integrator(0.05)


@pytest.fixture(scope="session")
def weights():
    return CostWeights(np.eye(2), np.eye(1))


@pytest.fixture(scope="session")
def X():
    return HPolyhedron.symmetric_box([10.0, 10.0])


@pytest.fixture(scope="session")
def U():
    return HPolyhedron.symmetric_box([20.0])


@pytest.fixture(scope="session")
def dare_result(di, weights):
    return solve_dare(di, weights)


@pytest.fixture(scope="session")
def terminal(di, X, U):
    t0 = time.perf_counter()
    res = max_stabilizing_set(di, X, U)
    res.seconds = time.perf_counter() - t0
    return res


@pytest.fixture(scope="session")
def make_config(di, weights, X, U, dare_result):
    def _make(N, Xf=None):
        return MpcConfig(di, N, weights, dare_result.Qf, X, U, Xf)
    return _make


@pytest.fixture(scope="session")
def reference_inputs():
    return np.loadtxt(DATA / "recursive_feasibility_inputs.csv", delimiter=",", skiprows=1)[:, 1]


@pytest.fixture(scope="session")
def ref_terminal_rows():
    data = np.loadtxt(DATA / "reference_terminal_set.csv", delimiter=",", skiprows=1)
    return data[:, :2], data[:, 2]
