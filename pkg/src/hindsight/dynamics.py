"""Trading state and the one-step transition function.

A trade leg executes at the decision-time quotes (``t - 1``); the resulting
position is valued at the arrival-time quotes (``t``).

The wait counter ``d`` counts periods since the last trade and saturates at
``d_cap - 1``; a trade is admissible only from a saturated counter.  The
initial state is born saturated, so the first trade is never delayed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from hindsight.costs import CostSchedule, fx_convert, max_integer_buy, sell_to_cash
from hindsight.errors import DomainError
from hindsight.market_data import MarketPanel, cross_rate


class State(NamedTuple):
    i: int  # investment id
    k: int  # trades so far
    j: int  # investment id at t-1
    m: float  # cash, in currency c
    n: int  # shares of i (0 for a currency position)
    w_ref: float  # wealth in the reference currency
    d: int  # periods since last trade, saturated at d_cap-1
    c: int  # currency of the cash position

    @property
    def is_trade(self) -> bool:
        return self.i != self.j


@dataclass(frozen=True)
class WaitPolicy:
    d_cap: int = 1

    def __post_init__(self):
        if self.d_cap < 1:
            raise DomainError("d_cap must be >= 1")


def initial_state(m0: float, wait: WaitPolicy = WaitPolicy()) -> State:
    if not m0 > 0:
        raise DomainError(f"initial cash must be positive, got {m0}")
    m0 = float(m0)
    return State(0, 0, 0, m0, 0, m0, wait.d_cap - 1, 0)


def revalue(s: State, t: int, panel: MarketPanel) -> float:
    """Reference-currency value of the position at time ``t``."""
    if s.n:
        gross = s.m + s.n * panel.price(s.i, t)
    else:
        gross = s.m
    return gross * cross_rate(panel, s.c, 0, t)


def _trade(s: State, u: int, t: int, panel: MarketPanel, costs: CostSchedule) -> State | None:
    universe = panel.universe
    te = t - 1
    cu = universe.currency_of(u)
    if universe.is_currency(s.i):
        cash = fx_convert(s.m, s.c, cu, te, panel, costs)
    else:
        cash = sell_to_cash(s.m, s.n, s.i, cu, te, panel, costs)

    if universe.is_currency(u):
        if cash < 0.0:
            return None
        n = 0
    else:
        n, cash = max_integer_buy(cash, u, te, panel, costs)
        if n < 1:
            return None
    new = State(u, s.k + 1, s.i, cash, n, 0.0, 0, cu)
    w = revalue(new, t, panel)
    if not w > 0.0:
        return None
    return new._replace(w_ref=w)


def hold(s: State, t: int, panel: MarketPanel, wait: WaitPolicy) -> State:
    d = s.d + 1 if s.d < wait.d_cap - 1 else wait.d_cap - 1
    return State(s.i, s.k, s.i, s.m, s.n, revalue(s, t, panel), d, s.c)


def successors(
    s: State,
    t: int,
    panel: MarketPanel,
    costs: CostSchedule,
    wait: WaitPolicy,
    targets: Iterable[int],
) -> list[State]:
    """Feasible states at ``t`` reachable from ``s`` (at ``t - 1``), one per admissible target.

    Infeasible targets (wait not elapsed, fewer than one share affordable,
    negative cash) are silently skipped.
    """
    if t < 1:
        raise DomainError("successors need t >= 1")
    ready = s.d >= wait.d_cap - 1
    out = []
    for u in sorted(targets):
        if u == s.i:
            out.append(hold(s, t, panel, wait))
        elif ready:
            nxt = _trade(s, u, t, panel, costs)
            if nxt is not None:
                out.append(nxt)
    return out
