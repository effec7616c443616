"""Evaluation quantities, the Buy-and-Hold baseline and per-timestep labels.

A round trip is a maximal run of consecutive times holding the same
non-currency asset.  Its entry valuation is taken at the decision time
``tau`` (one step before the first holding time, when the buy executes) and
its exit valuation at ``eta``, the last holding time (the sale executes at
the ``eta`` quotes).  Gain is ``100 * (w_eta - w_tau) / w_tau`` and the
duration is ``eta - tau``.  A position still open at the horizon is closed
synthetically at its terminal valuation and flagged.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Sequence

from hindsight.costs import CostSchedule
from hindsight.dynamics import WaitPolicy, hold, initial_state, successors
from hindsight.errors import InfeasibleError
from hindsight.market_data import MarketPanel
from hindsight.optimizer import Trajectory

LABEL_HEADER = ["date", "asset_id", "action", "wealth_ref", "return_pct"]


@dataclass(frozen=True)
class RoundTrip:
    asset: int
    entry_t: int
    exit_t: int
    gain_pct: float
    open_at_end: bool = False

    @property
    def duration(self) -> int:
        return self.exit_t - self.entry_t


@dataclass
class EvaluationReport:
    r_total: float
    k_total: int
    d_min: int
    round_trips: list[RoundTrip]
    return_path: list[float]

    @property
    def e(self) -> tuple[float, int, int]:
        return (self.r_total, self.k_total, self.d_min)

    @property
    def E(self) -> tuple[tuple[float, float, float], tuple[float, float, float]] | None:
        """``[[avg, min, max] of gains %], [[avg, min, max] of durations]``; None without round trips."""
        if not self.round_trips:
            return None
        gains = [rt.gain_pct for rt in self.round_trips]
        days = [rt.duration for rt in self.round_trips]
        return (
            (math.fsum(gains) / len(gains), min(gains), max(gains)),
            (sum(days) / len(days), min(days), max(days)),
        )

    @property
    def open_at_end(self) -> bool:
        return bool(self.round_trips) and self.round_trips[-1].open_at_end

    def to_dict(self) -> dict:
        E = self.E
        return {
            "e": list(self.e),
            "E": None if E is None else [list(E[0]), list(E[1])],
            "round_trips": [
                {
                    "asset": rt.asset,
                    "entry_t": rt.entry_t,
                    "exit_t": rt.exit_t,
                    "duration": rt.duration,
                    "gain_pct": rt.gain_pct,
                    "open_at_end": rt.open_at_end,
                }
                for rt in self.round_trips
            ],
            "open_at_end": self.open_at_end,
        }


def _wealth_path(traj: Trajectory) -> list[float]:
    w = [s.w_ref for s in traj.states]
    w[-1] = traj.final_wealth
    return w


def round_trips(traj: Trajectory, panel: MarketPanel) -> list[RoundTrip]:
    is_currency = panel.universe.is_currency
    ids = traj.ids
    w = [s.w_ref for s in traj.states]
    last = len(ids) - 1
    out = []
    t = 1
    while t <= last:
        a = ids[t]
        if is_currency(a) or ids[t - 1] == a:
            t += 1
            continue
        start = t
        while t + 1 <= last and ids[t + 1] == a:
            t += 1
        tau, eta = start - 1, t
        out.append(RoundTrip(a, tau, eta, 100.0 * (w[eta] - w[tau]) / w[tau], eta == last))
        t += 1
    return out


def evaluate_trajectory(traj: Trajectory, panel: MarketPanel, m0: float) -> EvaluationReport:
    w = _wealth_path(traj)
    path = [100.0 * (x - m0) / m0 for x in w]
    times = [t for t, _, _ in traj.trades]
    if len(times) >= 2:
        d_min = min(b - a for a, b in zip(times, times[1:]))
    else:
        d_min = traj.n_steps
    return EvaluationReport(path[-1], len(times), d_min, round_trips(traj, panel), path)


def summary_return(reports: Iterable[EvaluationReport]) -> float:
    """Portfolio figure: the plain sum of per-slot total returns."""
    return math.fsum(r.r_total for r in reports)


def buy_and_hold(panel: MarketPanel, costs: CostSchedule, a: int, m0: float) -> tuple[Trajectory, EvaluationReport]:
    """Buy ``a`` with all cash at t=0 (costs included) and hold to the horizon."""
    wait = WaitPolicy(1)
    z = initial_state(m0, wait)
    first = successors(z, 1, panel, costs, wait, (a,))
    if not first or first[0].i != a:
        raise InfeasibleError(f"cannot enter investment {a} at t=0 with {m0}")
    states = [z, first[0]]
    for t in range(2, panel.n_steps + 1):
        states.append(hold(states[-1], t, panel, wait))
    traj = Trajectory(states, states[-1].w_ref)
    return traj, evaluate_trajectory(traj, panel, m0)


@dataclass(frozen=True)
class LabelRecord:
    date: date
    asset_id: int
    action: str
    wealth_ref: float
    return_pct: float


@dataclass
class LabelSeries:
    q: int
    records: list[LabelRecord] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(LABEL_HEADER)
        for r in self.records:
            w.writerow([r.date.isoformat(), r.asset_id, r.action, repr(r.wealth_ref), repr(r.return_pct)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, q: int = 0) -> "LabelSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != LABEL_HEADER:
            raise ValueError(f"label CSV must start with header {LABEL_HEADER}")
        recs = [
            LabelRecord(date.fromisoformat(d), int(i), act, float(w), float(r))
            for d, i, act, w, r in rows[1:]
        ]
        return cls(q, recs)


def label_series(traj: Trajectory, panel: MarketPanel, m0: float, q: int = 0) -> LabelSeries:
    w = _wealth_path(traj)
    recs = []
    for t, s in enumerate(traj.states):
        action = "trade" if t > 0 and s.i != traj.states[t - 1].i else "hold"
        recs.append(LabelRecord(panel.dates[t], s.i, action, w[t], 100.0 * (w[t] - m0) / m0))
    return LabelSeries(q, recs)


def emit_labels(results, panel: MarketPanel) -> list[LabelSeries]:
    """One label series per slot of a portfolio result."""
    return [
        label_series(tr, panel, m0, q)
        for q, (tr, m0) in enumerate(zip(results.trajectories, results.initial_cash))
    ]


def plot_series(panel: MarketPanel) -> str:
    """Tidy CSV of normalized FX deltas and reference-currency normalized price deltas.

    ``dx_norm`` is ``x_t / x_0 - 1`` per currency (zero for the reference);
    ``dp_norm`` converts each asset price to the reference currency first.
    """
    u = panel.universe
    fx = panel.fx_to_ref
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["date", "instrument", "kind", "value"])
    for t, d in enumerate(panel.dates):
        for c in range(u.n_currencies):
            w.writerow([d.isoformat(), c, "dx_norm", repr(fx[c][t] / fx[c][0] - 1.0)])
        for a in range(u.n_currencies, u.n_ids):
            c = u.asset_currency[a]
            ref_t = panel.price(a, t) / fx[c][t]
            ref_0 = panel.price(a, 0) / fx[c][0]
            w.writerow([d.isoformat(), a, "dp_norm", repr(ref_t / ref_0 - 1.0)])
    return buf.getvalue()
