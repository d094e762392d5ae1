import numpy as np
import pytest
from hypothesis import settings

from pulsepath import ControlSpec, SystemParams

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        # lines carry '[PASS] n.' or '[FAIL] n.'; order by criterion number
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1].rstrip('.'))):
            terminalreporter.write_line(line)


@pytest.fixture
def fig_params():
    return SystemParams(omega0=0.02, mu=6.0)


@pytest.fixture
def fig1_spec():
    return ControlSpec(a_i=0.4, a_f=1.0, alpha=0.01, phi=0.0)


@pytest.fixture
def fig2_spec():
    return ControlSpec(a_i=0.4, a_f=1.0, alpha=0.05, phi=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
