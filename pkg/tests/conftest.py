import numpy as np
import pytest

from qpes.fixtures import standard_fixture


@pytest.fixture(scope="session")
def fx_exp():
    return standard_fixture("exponential")


@pytest.fixture(scope="session")
def fx_walk():
    return standard_fixture("walk")


@pytest.fixture(params=["exponential", "walk"], scope="session")
def fx(request):
    return standard_fixture(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
