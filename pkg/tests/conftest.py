import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nodsis.model import ModelParams  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def fig_params(beta, u0=0.7, kx=0.3, kp=0.7, delta=0.3, taux=1.0):
    return ModelParams(beta, delta, kp, kx, u0, taux)


@pytest.fixture
def fig1b():
    return lambda beta: fig_params(beta)


@pytest.fixture
def bistable():
    return fig_params(0.75)


@pytest.fixture
def strong_peer():
    return fig_params(0.75, u0=0.9, kx=0.7)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
