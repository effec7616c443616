import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_w1, random_instance
from hindsight.costs import CostSchedule
from hindsight.dynamics import State
from hindsight.errors import DomainError, InfeasibleError, OracleTooLargeError
from hindsight.market_data import MarketPanel, universe_from_currency_list
from hindsight.optimizer import (
    Layer,
    MaxTrades,
    MinWait,
    Unconstrained,
    brute_force_oracle,
    expand_layer,
    predicted_state_count,
    prune_k_heuristic,
    prune_wait_heuristic,
    solve,
)
from hindsight.synthetic import random_panel


def st_(i, w, k=0, d=0):
    return State(i, k, i, 0.0, 0, w, d, 0)


@pytest.mark.parametrize(
    "mode,wealth,ids",
    [
        (Unconstrained(), 1200.0, [0, 1, 0, 1]),
        (MaxTrades(2), 1150.0, [0, 1, 1, 1]),
        (MinWait(2), 1150.0, [0, 1, 1, 1]),
    ],
)
def test_w1_golden(w1, zero_w1, mode, wealth, ids):
    traj, stats = solve(w1, zero_w1, mode, 1000.0)
    assert traj.final_wealth == wealth
    assert traj.ids == ids
    assert brute_force_oracle(w1, zero_w1, mode, 1000.0).final_wealth == wealth
    assert len(stats.layer_sizes) == 4


def test_w1_unconstrained_trades(w1, zero_w1):
    traj, _ = solve(w1, zero_w1, Unconstrained(), 1000.0)
    assert traj.trades == [(1, 0, 1), (2, 1, 0), (3, 0, 1)]
    for t in range(1, 4):
        assert traj.states[t].j == traj.states[t - 1].i


@pytest.mark.parametrize("mode", [Unconstrained(), MaxTrades(1), MinWait(3)])
def test_flat_prices_stay_in_cash(mode):
    u = universe_from_currency_list([0, 1], 2)
    p = MarketPanel.from_arrays(u, [[1.3] * 6], [[50.0] * 6, [20.0] * 6])
    traj, _ = solve(p, CostSchedule.uniform(u, 0.01, 2.0), mode, 1000.0)
    assert traj.final_wealth == 1000.0
    assert traj.trades == []


def test_expand_keeps_richer_parent(w1, zero_w1):
    prev = Layer(1, {1: State(1, 1, 0, 0.0, 10, 1100.0, 0, 0), 0: st_(0, 1000.0)})
    nxt = expand_layer(prev, 2, w1, zero_w1, Unconstrained(), {1})
    assert list(nxt.states) == [1]
    assert nxt.parent_key[1] == 1  # holding 10 shares beats buying 9 at 110


def test_expand_max_trades_binding(w1, zero_w1):
    s = State(1, 1, 0, 0.0, 10, 1100.0, 0, 0)
    nxt = expand_layer(Layer(1, {(1, 1): s}), 2, w1, zero_w1, MaxTrades(1), {0, 1})
    assert list(nxt.states) == [(1, 1)]


def test_expand_rejects_empty_allowed(w1, zero_w1):
    with pytest.raises(InfeasibleError):
        expand_layer(Layer(0, {0: st_(0, 1.0)}), 1, w1, zero_w1, Unconstrained(), set())


def test_expand_propagation_error_names_t(w1, zero_w1):
    # only the asset is admissible but 1 unit of cash cannot buy a share
    with pytest.raises(InfeasibleError, match="t=1"):
        expand_layer(Layer(0, {0: State(0, 0, 0, 1.0, 0, 1.0, 0, 0)}), 1, w1, zero_w1, Unconstrained(), {1})


def test_k_heuristic_examples():
    lay = Layer(3, {(2, 1): st_(2, 110.0, k=1), (2, 2): st_(2, 108.0, k=2)})
    assert list(prune_k_heuristic(lay).states) == [(2, 1)]
    lay = Layer(3, {(2, 2): st_(2, 110.0, k=2), (2, 1): st_(2, 108.0, k=1)})
    assert len(prune_k_heuristic(lay)) == 2
    lay = Layer(3, {(1, 1): st_(1, 1.0, k=1), (2, 2): st_(2, 2.0, k=2)})
    assert prune_k_heuristic(lay).states == lay.states


def test_wait_heuristic_examples():
    lay = Layer(3, {(1, 3): st_(1, 100.0, d=3), (1, 1): st_(1, 98.0, d=1)})
    assert list(prune_wait_heuristic(lay).states) == [(1, 3)]
    lay = Layer(3, {(1, 3): st_(1, 100.0, d=3), (1, 0): st_(1, 90.0, d=0)})
    assert len(prune_wait_heuristic(lay)) == 2
    lay = Layer(3, {(1, 2): st_(1, 1.0, d=2), (2, 1): st_(2, 2.0, d=1)})
    assert prune_wait_heuristic(lay).states == lay.states


@pytest.mark.parametrize(
    "mode,n,t,expected",
    [
        (Unconstrained(), 3, 250, 751),
        (MaxTrades(2), 3, 3, 16),
        (MinWait(4), 5, 0, 1),
        (MaxTrades(7), 9, 0, 1),
        (MaxTrades(12), 31, 198, 71611),
        (MinWait(10), 31, 198, 59905),
        (Unconstrained(), 31, 198, 6139),
    ],
)
def test_predicted_state_count(mode, n, t, expected):
    assert predicted_state_count(mode, 1, n - 1, t) == expected


@pytest.mark.parametrize("mode", [Unconstrained(), MaxTrades(1), MaxTrades(3), MinWait(2), MinWait(4)])
@pytest.mark.parametrize("n_assets", [1, 2, 4])
def test_measured_counts_match_formula(mode, n_assets):
    panel = random_panel(7, 1, n_assets, 15)
    _, stats = solve(panel, CostSchedule.zero(panel.universe), mode, 1e8, use_heuristics=False)
    for t in range(16):
        want = predicted_state_count(mode, 1, n_assets, t)
        assert sum(stats.unpruned_sizes[: t + 1]) == want


def test_oracle_guard():
    panel = random_panel(1, 1, 4, 12)
    with pytest.raises(OracleTooLargeError):
        brute_force_oracle(panel, CostSchedule.zero(panel.universe), Unconstrained(), 1000.0)


def test_oracle_single_step_two_ids(w1, zero_w1):
    short = MarketPanel.from_arrays(w1.universe, [[1.0, 1.0]], [[100.0, 90.0]])
    traj = brute_force_oracle(short, zero_w1, Unconstrained(), 1000.0)
    assert traj.ids == [0, 0] and traj.final_wealth == 1000.0


def test_mode_validation():
    with pytest.raises(DomainError):
        MaxTrades(0)
    with pytest.raises(DomainError):
        MinWait(0)


def test_stats_export(w1, zero_w1):
    _, stats = solve(w1, zero_w1, MaxTrades(2), 1000.0)
    d = stats.to_dict()
    assert d["mode"] == "max_trades" and d["K"] == 2
    assert d["total_states"] == sum(d["layer_sizes"]) <= d["total_unpruned"]


def test_force_terminal_cash(w1):
    costs = CostSchedule.uniform(w1.universe, 0.01, 1.0)
    held, _ = solve(w1, costs, MaxTrades(1), 1000.0)
    cashed, _ = solve(w1, costs, MaxTrades(1), 1000.0, force_terminal_cash=True)
    assert cashed.liquidated
    assert cashed.final_wealth <= held.final_wealth


def test_deterministic(w1, zero_w1):
    a, _ = solve(w1, zero_w1, MinWait(2), 1000.0)
    b, _ = solve(w1, zero_w1, MinWait(2), 1000.0)
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_equivalence_property(seed):
    panel, costs, K, D = random_instance(np.random.default_rng(seed))
    for mode in (Unconstrained(), MaxTrades(K), MinWait(D)):
        want = brute_force_oracle(panel, costs, mode, 1e4).final_wealth
        assert solve(panel, costs, mode, 1e4)[0].final_wealth == want
        assert solve(panel, costs, mode, 1e4, use_heuristics=False)[0].final_wealth == want


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_return_is_never_negative(seed):
    panel, costs, K, _ = random_instance(np.random.default_rng(seed))
    for mode in (Unconstrained(), MaxTrades(K)):
        assert solve(panel, costs, mode, 1e4)[0].final_wealth >= 1e4


def test_keeping_every_parent_agrees_with_dominance():
    """Without per-key dominance: enumerate all partial paths layer by layer."""
    from hindsight.dynamics import initial_state, successors

    rng = np.random.default_rng(11)
    for _ in range(30):
        panel, costs, K, _ = random_instance(rng)
        mode = MaxTrades(K)
        frontier = [initial_state(1e4, mode.wait)]
        for t in range(1, panel.n_steps + 1):
            frontier = [
                c
                for s in frontier
                for c in successors(s, t, panel, costs, mode.wait, panel.universe.ids if s.k < K else (s.i,))
            ]
        assert max(s.w_ref for s in frontier) == solve(panel, costs, mode, 1e4)[0].final_wealth
