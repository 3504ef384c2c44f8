import math

import numpy as np
import pytest

from uavrelay.channel import ChannelParams, Scenario


def section5(**changes) -> Scenario:
    """p_t = p_MSI = 80 W, p_u = 1 W, D = 1000 m, MSI at (500, 400), h = 20 m."""
    sc = Scenario(1000.0, 500.0, 400.0, 80.0, 1.0, 80.0, 20.0, 100.0, 4.0)
    return sc.with_(**changes) if changes else sc


def fig4(power_tx_w=1.0, **changes) -> Scenario:
    sc = Scenario(35.0, 30.0, 30.0, power_tx_w, 1.0, 1.0, 10.0, 50.0, 1.0)
    return sc.with_(**changes) if changes else sc


def unit_channel() -> ChannelParams:
    """Constants with 4 pi f_c / c = 1 and C_LoS = 1."""
    c = 299792458.0
    return ChannelParams(carrier_frequency_hz=c / (4 * math.pi), excess_loss_los=1.0)


def random_scenario(rng: np.random.Generator) -> Scenario:
    D = rng.uniform(20, 100)
    h_lo, h_hi = sorted(rng.uniform(5, 60, 2))
    p = 10 ** rng.uniform(-1, 2, 3)
    return Scenario(D, rng.uniform(0, D), rng.uniform(0, 2 * D), p[0], p[1], p[2], h_lo, h_hi)


@pytest.fixture
def sc5():
    return section5()


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
