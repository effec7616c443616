"""Q wealth-ordered trajectories holding pairwise-distinct investments.

Slots are solved in order.  Slot ``q`` may not hold, at its constrained
times, any id held at that time by the already fixed optimal trajectories
``r < q``.  Every slot starts in the reference currency, so t = 0 is never
constrained.

In the synchronous variant slot 0 is solved freely, its trade times define
the only instants at which later slots may trade, and the exclusion is
applied at those instants.  Between them every later slot holds, which keeps
its investment distinct from all earlier slots once they have all traded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from hindsight.analytics import EvaluationReport, evaluate_trajectory, summary_return
from hindsight.costs import CostSchedule
from hindsight.errors import DomainError, InfeasibleError
from hindsight.market_data import MarketPanel
from hindsight.optimizer import ConstraintMode, GraphStats, Trajectory, Unconstrained, solve


@dataclass(frozen=True)
class DiversificationPlan:
    q_count: int = 1
    split: tuple[float, ...] | None = None
    constrained_times: tuple[frozenset[int] | None, ...] | None = None
    sync: bool = False
    mode: ConstraintMode = field(default_factory=Unconstrained)

    def __post_init__(self):
        if self.q_count < 1:
            raise DomainError("Q must be >= 1")
        split = self.split
        if split is None:
            split = (1.0 / self.q_count,) * self.q_count
        split = tuple(float(f) for f in split)
        if len(split) != self.q_count or any(not f > 0 for f in split):
            raise DomainError("split needs Q positive fractions")
        if abs(math.fsum(split) - 1.0) > 1e-12:
            raise DomainError(f"split fractions sum to {math.fsum(split)}, not 1")
        object.__setattr__(self, "split", split)

        times = self.constrained_times
        if times is None:
            times = (None,) * self.q_count
        if len(times) != self.q_count:
            raise DomainError("constrained_times needs one entry per slot")
        # t = 0 is the shared initial state and cannot be constrained
        times = tuple(None if ts is None else frozenset(t for t in ts if t != 0) for ts in times)
        object.__setattr__(self, "constrained_times", times)

    def validate(self, panel: MarketPanel) -> None:
        n_ids = panel.universe.n_ids
        if self.q_count > n_ids:
            raise DomainError(f"Q={self.q_count} exceeds the {n_ids} available investments")
        for ts in self.constrained_times:
            if ts is not None and any(not 0 < t <= panel.n_steps for t in ts):
                raise DomainError(f"constrained times must lie in 1..{panel.n_steps}")

    def times_for(self, q: int, n_steps: int) -> frozenset[int]:
        ts = self.constrained_times[q]
        return frozenset(range(1, n_steps + 1)) if ts is None else ts


@dataclass
class PortfolioResult:
    trajectories: list[Trajectory]
    reports: list[EvaluationReport]
    stats: list[GraphStats]
    initial_cash: list[float]
    trade_schedule: frozenset[int] | None = None

    @property
    def summary_return(self) -> float:
        return summary_return(self.reports)


def extract_trade_schedule(traj: Trajectory) -> frozenset[int]:
    """Times t >= 1 at which the trajectory changes investment."""
    return frozenset(t for t, _, _ in traj.trades)


def exclusions(priors: Sequence[Trajectory], times) -> dict[int, frozenset[int]]:
    """Ids held by the prior trajectories at each constrained time."""
    return {t: frozenset(p.states[t].i for p in priors) for t in times}


def solve_slot(
    panel: MarketPanel,
    costs: CostSchedule,
    mode: ConstraintMode,
    m0: float,
    priors: Sequence[Trajectory],
    constrained_times,
    trade_times=None,
    use_heuristics: bool = True,
    force_terminal_cash: bool = False,
    q: int | None = None,
) -> tuple[Trajectory, GraphStats]:
    """One slot of the sequential scheme, given the fixed trajectories of earlier slots."""
    all_ids = frozenset(panel.universe.ids)
    allowed = {}
    for t, taken in exclusions(priors, constrained_times).items():
        rest = all_ids - taken
        if not rest:
            raise InfeasibleError(f"slot q={q}: every investment is excluded at t={t}")
        allowed[t] = rest
    try:
        return solve(
            panel,
            costs,
            mode,
            m0,
            allowed_per_t=allowed,
            use_heuristics=use_heuristics,
            trade_times=trade_times,
            force_terminal_cash=force_terminal_cash,
        )
    except InfeasibleError as e:
        raise InfeasibleError(f"slot q={q}: {e}") from e


def _finish(panel, plan, m0, trajs, stats, schedule=None) -> PortfolioResult:
    cash = [m0 * f for f in plan.split]
    reports = [evaluate_trajectory(tr, panel, c) for tr, c in zip(trajs, cash)]
    return PortfolioResult(trajs, reports, stats, cash, schedule)


def solve_portfolio(
    panel: MarketPanel,
    costs: CostSchedule,
    plan: DiversificationPlan,
    m0: float,
    use_heuristics: bool = True,
    force_terminal_cash: bool = False,
) -> PortfolioResult:
    """Asynchronous variant: every slot trades freely, subject to the exclusions."""
    if plan.sync:
        raise DomainError("plan is synchronous; use solve_portfolio_sync")
    plan.validate(panel)
    trajs: list[Trajectory] = []
    stats: list[GraphStats] = []
    for q in range(plan.q_count):
        times = plan.times_for(q, panel.n_steps) if q else ()
        tr, st = solve_slot(
            panel, costs, plan.mode, m0 * plan.split[q], trajs, times,
            use_heuristics=use_heuristics, force_terminal_cash=force_terminal_cash, q=q,
        )
        trajs.append(tr)
        stats.append(st)
    return _finish(panel, plan, m0, trajs, stats)


def solve_portfolio_sync(
    panel: MarketPanel,
    costs: CostSchedule,
    plan: DiversificationPlan,
    m0: float,
    use_heuristics: bool = True,
    force_terminal_cash: bool = False,
) -> PortfolioResult:
    """Synchronous variant: slots q > 0 trade only when slot 0 trades."""
    if not plan.sync:
        raise DomainError("plan is asynchronous; use solve_portfolio")
    plan.validate(panel)
    first, st0 = solve_slot(
        panel, costs, plan.mode, m0 * plan.split[0], [], (),
        use_heuristics=use_heuristics, force_terminal_cash=force_terminal_cash, q=0,
    )
    schedule = extract_trade_schedule(first)
    trajs, stats = [first], [st0]
    for q in range(1, plan.q_count):
        times = schedule & plan.times_for(q, panel.n_steps)
        tr, st = solve_slot(
            panel, costs, plan.mode, m0 * plan.split[q], trajs, times,
            trade_times=schedule, use_heuristics=use_heuristics,
            force_terminal_cash=force_terminal_cash, q=q,
        )
        trajs.append(tr)
        stats.append(st)
    return _finish(panel, plan, m0, trajs, stats, schedule)


def run_plan(panel, costs, plan: DiversificationPlan, m0: float, **kw) -> PortfolioResult:
    fn = solve_portfolio_sync if plan.sync else solve_portfolio
    return fn(panel, costs, plan, m0, **kw)
