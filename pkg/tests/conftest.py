import sys

import pytest

from morsecx.cells import build_complex


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20261015,
                     help="seed for randomized property tests")


@pytest.fixture(scope="session")
def seed(request):
    return request.config.getoption("--seed")


_COMPLEXES = {}


def complex_for(p, q, r):
    if (p, q, r) not in _COMPLEXES:
        _COMPLEXES[(p, q, r)] = build_complex(p, q, r)
    return _COMPLEXES[(p, q, r)]


@pytest.fixture(scope="session")
def k121():
    return complex_for(1, 2, 1)


@pytest.fixture(scope="session")
def k132():
    return complex_for(1, 3, 2)


@pytest.fixture(scope="session")
def k112():
    return complex_for(1, 1, 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
