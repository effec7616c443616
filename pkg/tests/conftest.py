import numpy as np
import pytest

from hindsight.costs import CostSchedule
from hindsight.market_data import MarketPanel, universe_from_currency_list
from hindsight.synthetic import random_panel

W1_PRICES = [100.0, 110.0, 105.0, 115.0]


def make_w1() -> MarketPanel:
    """One reference-currency asset, prices 100, 110, 105, 115."""
    universe = universe_from_currency_list([0], 1)
    return MarketPanel.from_arrays(universe, [[1.0] * 4], [W1_PRICES])


def make_w2() -> MarketPanel:
    """Three ids (reference cash plus two reference-currency assets), N_t = 4."""
    universe = universe_from_currency_list([0, 0], 1)
    prices = [
        [100.0, 104.0, 99.0, 108.0, 103.0],
        [100.0, 97.0, 103.0, 101.0, 106.0],
    ]
    return MarketPanel.from_arrays(universe, [[1.0] * 5], prices)


def random_instance(rng: np.random.Generator):
    """Small instance in the oracle-sized family: N_t 3..7, N_c 1..2, N_a 1..2."""
    n_steps = int(rng.integers(3, 8))
    nc = int(rng.integers(1, 3))
    na = int(rng.integers(1, 3))
    panel = random_panel(rng, nc, na, n_steps)
    eps = float(rng.uniform(0.0, 0.03))
    beta = float(rng.choice([0.0, 0.5, 5.0]))
    costs = CostSchedule.uniform(panel.universe, eps, beta)
    K = int(rng.integers(1, 4))
    D = int(rng.integers(1, 4))
    return panel, costs, K, D


@pytest.fixture
def w1():
    return make_w1()


@pytest.fixture
def w2():
    return make_w2()


@pytest.fixture
def zero_w1(w1):
    return CostSchedule.zero(w1.universe)


# One line per acceptance criterion, filled by test_acceptance.py and echoed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
