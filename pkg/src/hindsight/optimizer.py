"""Layered transition-graph search for a single wealth-maximizing trajectory.

Each layer keeps at most one state per key (the wealth-maximal one).  The
key depends on the trade-frequency regime:

* ``Unconstrained``: ``i``
* ``MaxTrades(K)``: ``(i, k)`` with ``k`` in ``0..K``; no trade edges leave ``k = K``
* ``MinWait(D)``: ``(i, d)`` with ``d`` in ``0..D-1``

The optimal trajectory is recovered by following parent keys backwards from
the best terminal state.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from hindsight.costs import CostSchedule, fx_convert, sell_to_cash
from hindsight.dynamics import State, WaitPolicy, initial_state, successors
from hindsight.errors import DomainError, InfeasibleError, OracleTooLargeError, PropagationError
from hindsight.market_data import MarketPanel


@dataclass(frozen=True)
class Unconstrained:
    wait = WaitPolicy(1)

    def key(self, s: State):
        return s.i

    def can_trade(self, s: State) -> bool:
        return True

    def params(self) -> dict:
        return {"mode": "unconstrained"}


@dataclass(frozen=True)
class MaxTrades:
    K: int

    def __post_init__(self):
        if self.K < 1:
            raise DomainError("K must be >= 1")

    @property
    def wait(self) -> WaitPolicy:
        return WaitPolicy(1)

    def key(self, s: State):
        return (s.i, s.k)

    def can_trade(self, s: State) -> bool:
        return s.k < self.K

    def params(self) -> dict:
        return {"mode": "max_trades", "K": self.K}


@dataclass(frozen=True)
class MinWait:
    D: int

    def __post_init__(self):
        if self.D < 1:
            raise DomainError("D must be >= 1")

    @property
    def wait(self) -> WaitPolicy:
        return WaitPolicy(self.D)

    def key(self, s: State):
        return (s.i, s.d)

    def can_trade(self, s: State) -> bool:
        return True  # the wait rule lives in the dynamics

    def params(self) -> dict:
        return {"mode": "min_wait", "D": self.D}


ConstraintMode = Union[Unconstrained, MaxTrades, MinWait]


@dataclass
class Layer:
    t: int
    states: dict
    parent_key: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class Trajectory:
    states: tuple[State, ...]
    final_wealth: float
    liquidated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    @property
    def ids(self) -> list[int]:
        return [s.i for s in self.states]

    @property
    def trades(self) -> list[tuple[int, int, int]]:
        """``(t, from_id, to_id)`` for every t whose investment differs from t-1."""
        st = self.states
        return [(t, st[t - 1].i, st[t].i) for t in range(1, len(st)) if st[t].i != st[t - 1].i]

    @property
    def n_steps(self) -> int:
        return len(self.states) - 1


@dataclass
class GraphStats:
    params: dict
    layer_sizes: list[int]
    unpruned_sizes: list[int]
    wall_time_s: float = 0.0

    @property
    def total_states(self) -> int:
        return sum(self.layer_sizes)

    @property
    def total_unpruned(self) -> int:
        return sum(self.unpruned_sizes)

    def to_dict(self) -> dict:
        return {
            **self.params,
            "layer_sizes": self.layer_sizes,
            "unpruned_sizes": self.unpruned_sizes,
            "total_states": self.total_states,
            "total_unpruned": self.total_unpruned,
            "wall_time_s": self.wall_time_s,
        }


def expand_layer(
    prev: Layer,
    t: int,
    panel: MarketPanel,
    costs: CostSchedule,
    mode: ConstraintMode,
    allowed: Iterable[int],
    can_trade: bool = True,
) -> Layer:
    """Branch every state of ``prev`` into ``allowed`` targets and keep the best state per key.

    Ties on wealth prefer a hold over a trade, then the smaller parent key
    (parents are visited in sorted key order).  ``can_trade=False`` restricts
    the layer to holds.
    """
    allowed = frozenset(allowed)
    if not allowed:
        raise InfeasibleError(f"empty set of admissible investments at t={t}")
    wait = mode.wait
    best: dict = {}
    parents: dict = {}
    for pk in sorted(prev.states):
        s = prev.states[pk]
        if can_trade and mode.can_trade(s):
            targets = allowed
        else:
            targets = (s.i,) if s.i in allowed else ()
        for cand in successors(s, t, panel, costs, wait, targets):
            key = mode.key(cand)
            cur = best.get(key)
            if (
                cur is None
                or cand.w_ref > cur.w_ref
                or (cand.w_ref == cur.w_ref and cur.is_trade and not cand.is_trade)
            ):
                best[key] = cand
                parents[key] = pk
    if not best:
        raise PropagationError(t)
    return Layer(t, best, parents)


def _drop(layer: Layer, doomed: list) -> Layer:
    if not doomed:
        return layer
    states = dict(layer.states)
    parents = dict(layer.parent_key)
    for key in doomed:
        del states[key]
        parents.pop(key, None)
    return Layer(layer.t, states, parents)


def _best_per_id(layer: Layer, prefer_high_second: bool) -> dict:
    """Map id -> second key component of its wealth-maximal state."""
    best: dict = {}
    for (i, x), s in layer.states.items():
        cur = best.get(i)
        if cur is None:
            best[i] = (s.w_ref, x)
            continue
        w, bx = cur
        if s.w_ref > w or (s.w_ref == w and ((x > bx) if prefer_high_second else (x < bx))):
            best[i] = (s.w_ref, x)
    return {i: x for i, (_, x) in best.items()}


def prune_k_heuristic(layer: Layer) -> Layer:
    """Per id, drop states that used more trades than the wealth-maximal one."""
    k_opt = _best_per_id(layer, prefer_high_second=False)
    return _drop(layer, [key for key in layer.states if key[1] > k_opt[key[0]]])


def prune_wait_heuristic(layer: Layer) -> Layer:
    """Per id, drop states with ``0 < d < d_opt``: they are poorer and further from their next trade."""
    d_opt = _best_per_id(layer, prefer_high_second=True)
    return _drop(layer, [key for key in layer.states if 0 < key[1] < d_opt[key[0]]])


def liquidation_value(s: State, t: int, panel: MarketPanel, costs: CostSchedule) -> float:
    """Reference-currency cash from selling everything at the time-``t`` quotes."""
    if s.i == 0:
        return s.m
    if panel.universe.is_currency(s.i):
        return fx_convert(s.m, s.c, 0, t, panel, costs)
    return sell_to_cash(s.m, s.n, s.i, 0, t, panel, costs)


def solve(
    panel: MarketPanel,
    costs: CostSchedule,
    mode: ConstraintMode,
    m0: float,
    allowed_per_t: Mapping[int, Iterable[int]] | None = None,
    use_heuristics: bool = True,
    trade_times: Iterable[int] | None = None,
    force_terminal_cash: bool = False,
) -> tuple[Trajectory, GraphStats]:
    """Wealth-maximizing trajectory over the whole panel.

    ``allowed_per_t`` restricts the investment ids admissible at given times;
    ``trade_times`` (if given) forbids trades at any other t.  With
    ``force_terminal_cash`` the terminal state is chosen by, and reported at,
    its liquidation value in the reference currency; that final sale is not
    counted as a trade.
    """
    n_steps = panel.n_steps
    if n_steps < 1:
        raise DomainError("panel needs at least two dates")
    started = time.perf_counter()
    all_ids = frozenset(panel.universe.ids)
    allowed_per_t = allowed_per_t or {}
    trade_times = None if trade_times is None else frozenset(trade_times)

    z0 = initial_state(m0, mode.wait)
    layers = [Layer(0, {mode.key(z0): z0})]
    sizes, unpruned = [1], [1]
    for t in range(1, n_steps + 1):
        allowed = allowed_per_t.get(t, all_ids)
        can_trade = trade_times is None or t in trade_times
        layer = expand_layer(layers[-1], t, panel, costs, mode, allowed, can_trade)
        unpruned.append(len(layer))
        if use_heuristics:
            if isinstance(mode, MaxTrades):
                layer = prune_k_heuristic(layer)
            elif isinstance(mode, MinWait):
                layer = prune_wait_heuristic(layer)
        sizes.append(len(layer))
        layers.append(layer)

    final = layers[-1]

    def score(key):
        s = final.states[key]
        return liquidation_value(s, n_steps, panel, costs) if force_terminal_cash else s.w_ref

    best_key = None
    best_val = None
    for key in sorted(final.states):
        v = score(key)
        if best_val is None or v > best_val:
            best_key, best_val = key, v

    path = [final.states[best_key]]
    key = best_key
    for t in range(n_steps, 0, -1):
        key = layers[t].parent_key[key]
        path.append(layers[t - 1].states[key])
    path.reverse()

    stats = GraphStats(mode.params(), sizes, unpruned, time.perf_counter() - started)
    return Trajectory(path, best_val, liquidated=force_terminal_cash), stats


def brute_force_oracle(
    panel: MarketPanel,
    costs: CostSchedule,
    mode: ConstraintMode,
    m0: float,
    allowed_per_t: Mapping[int, Iterable[int]] | None = None,
    trade_times: Iterable[int] | None = None,
    limit: int = 10**7,
) -> Trajectory:
    """Exhaustive search over every id sequence ``i_1..i_{N_t}``.

    Sequences are simulated without any wait rule and then filtered on the
    trade count and on the gaps between consecutive trade times, so the
    wait-counter bookkeeping of the graph search is checked independently.
    Ties keep the lexicographically smallest sequence.
    """
    n_ids, n_steps = panel.universe.n_ids, panel.n_steps
    if n_ids**n_steps > limit:
        raise OracleTooLargeError(n_ids, n_steps, limit)
    max_k = mode.K if isinstance(mode, MaxTrades) else None
    min_gap = mode.D if isinstance(mode, MinWait) else 1
    allowed_per_t = {t: frozenset(v) for t, v in (allowed_per_t or {}).items()}
    trade_times = None if trade_times is None else frozenset(trade_times)
    free = WaitPolicy(1)

    best: list = [None, None]  # wealth, path

    def walk(path: list[State], last_trade: int | None, trades: int):
        t = len(path)
        if t > n_steps:
            w = path[-1].w_ref
            if best[0] is None or w > best[0]:
                best[0], best[1] = w, list(path)
            return
        s = path[-1]
        allowed = allowed_per_t.get(t)
        for u in range(n_ids):
            if allowed is not None and u not in allowed:
                continue
            is_trade = u != s.i
            if is_trade:
                if trade_times is not None and t not in trade_times:
                    continue
                if max_k is not None and trades + 1 > max_k:
                    continue
                if last_trade is not None and t - last_trade < min_gap:
                    continue
            nxt = successors(s, t, panel, costs, free, (u,))
            if not nxt:
                continue
            path.append(nxt[0])
            walk(path, t if is_trade else last_trade, trades + is_trade)
            path.pop()

    walk([initial_state(m0, free)], None, 0)
    if best[1] is None:
        raise InfeasibleError("no admissible id sequence")
    return Trajectory(best[1], best[0])


def predicted_state_count(mode: ConstraintMode, n_currencies: int, n_assets: int, t: int) -> int:
    """Closed-form N_z(t): total states in layers 0..t of the unpruned graph.

    Assumes every transition is feasible.  Per layer l >= 1, with N ids:

    * unconstrained: N
    * at most K trades: N * min(l, K) for N >= 3.  With N = 2 the trade
      count's parity is pinned by the id, leaving 1 + min(l, K) keys.
    * wait D: (N-1) * min(l, D) + 1 + min(max(0, l-D), D-1).  The first
      term counts non-reference ids (fresh d < D-1 after a trade, plus the
      saturated d once l >= D); the rest counts the reference id, which can
      only be re-entered after a completed wait.
    """
    n = n_currencies + n_assets
    if t < 0:
        raise DomainError("t must be >= 0")
    total = 1
    for l in range(1, t + 1):
        if n == 1:
            total += 1
        elif isinstance(mode, Unconstrained):
            total += n
        elif isinstance(mode, MaxTrades):
            m = min(l, mode.K)
            total += n * m if n >= 3 else 1 + m
        elif isinstance(mode, MinWait):
            D = mode.D
            total += (n - 1) * min(l, D) + 1 + min(max(0, l - D), D - 1)
        else:
            raise DomainError(f"unknown mode {mode!r}")
    return total
