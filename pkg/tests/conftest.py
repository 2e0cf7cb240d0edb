import pytest

from fuzzyblend.config import ScenarioConfig
from fuzzyblend.sim import build_controllers
from fuzzyblend.turbine import TurbineParams, default_aero
from fuzzyblend.wind import Constant


@pytest.fixture(scope="session")
def params():
    return TurbineParams()


@pytest.fixture(scope="session")
def aero(params):
    return default_aero(params)


@pytest.fixture(scope="session")
def controllers(aero):
    return build_controllers(ScenarioConfig(wind=Constant(8.0), duration=1.0), aero)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
