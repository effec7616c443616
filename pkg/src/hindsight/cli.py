"""Command-line front end.

Exit codes: 0 ok, 2 config/domain error, 3 infeasible, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from hindsight.analytics import buy_and_hold, emit_labels, plot_series
from hindsight.config import RunConfig, load_config
from hindsight.diversification import PortfolioResult, run_plan
from hindsight.errors import DomainError, InfeasibleError
from hindsight.optimizer import predicted_state_count

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4


class OutputError(Exception):
    pass


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt_e(e) -> str:
    r, k, dmin = e
    return f"r_total={r:.1f} K_total={k} D_min={dmin}"


def _out_dir(cfg: RunConfig, args) -> Path:
    return Path(args.out) if args.out else cfg.resolve(cfg.output_dir)


def _run(cfg: RunConfig, args, eps=None, beta=None):
    panel = cfg.load_panel(args.seed)
    costs = cfg.cost_schedule(panel.universe, eps, beta)
    plan = cfg.plan(sync=True if args.sync else None)
    result = run_plan(
        panel,
        costs,
        plan,
        cfg.m0,
        use_heuristics=cfg.use_heuristics and not args.no_heuristics,
        force_terminal_cash=cfg.force_terminal_cash,
    )
    return panel, costs, plan, result


def _write_results(out: Path, panel, plan, result: PortfolioResult, m0: float) -> None:
    slots = []
    for q, (rep, tr, st) in enumerate(zip(result.reports, result.trajectories, result.stats)):
        _write(out / f"report_q{q}.json", _dump(rep.to_dict()))
        _write(out / f"stats_q{q}.json", _dump(st.to_dict()))
        slots.append(
            {
                "q": q,
                "e": list(rep.e),
                "initial_cash": result.initial_cash[q],
                "final_wealth": tr.final_wealth,
                "trades": [list(x) for x in tr.trades],
            }
        )
    for series in emit_labels(result, panel):
        _write(out / f"labels_q{series.q}.csv", series.to_csv())
    summary = {
        **plan.mode.params(),
        "Q": plan.q_count,
        "sync": plan.sync,
        "m0": m0,
        "summary_return": result.summary_return,
        "slots": slots,
    }
    _write(out / "summary.json", _dump(summary))
    _write(out / "panel.csv", panel.to_csv())
    _write(out / "plot_series.csv", plot_series(panel))


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    panel, _, plan, result = _run(cfg, args)
    out = _out_dir(cfg, args)
    _write_results(out, panel, plan, result, cfg.m0)
    for q, rep in enumerate(result.reports):
        print(f"q={q} {_fmt_e(rep.e)}")
    if plan.q_count > 1:
        print(f"summary_return={result.summary_return:.1f}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    cfg = load_config(args.config)
    asset = args.asset if args.asset is not None else cfg.baseline_asset
    if asset is None:
        raise DomainError("baseline needs --asset or 'baseline_asset' in the config")
    panel = cfg.load_panel(args.seed)
    if not 0 < asset < panel.universe.n_ids:
        raise DomainError(f"asset id {asset} is not a tradable instrument")
    costs = cfg.cost_schedule(panel.universe)
    traj, rep = buy_and_hold(panel, costs, asset, cfg.m0)
    out = _out_dir(cfg, args)
    _write(out / f"baseline_{asset}.json", _dump({"asset": asset, **rep.to_dict()}))
    print(f"asset={asset} {_fmt_e(rep.e)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    levels = args.eps_pct
    if any(v < 0 or v >= 100 for v in levels):
        raise DomainError(f"proportional cost levels must lie in [0, 100) percent, got {levels}")
    out = _out_dir(cfg, args)
    rows = []
    for v in levels:
        # zero proportional cost also drops the fixed charge
        beta = 0.0 if v == 0 else cfg.costs.beta
        panel, _, plan, result = _run(cfg, args, eps=v / 100.0, beta=beta)
        _write_results(out / f"eps_{v:g}", panel, plan, result, cfg.m0)
        row = {"eps_pct": v, "beta": beta, "summary_return": result.summary_return}
        for q, rep in enumerate(result.reports):
            row[f"r_q{q}"], row[f"k_q{q}"], row[f"dmin_q{q}"] = rep.e
        rows.append(row)
        print(f"eps={v:g}% beta={beta:g} summary_return={result.summary_return:.1f}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(x) if isinstance(x, float) else x for k, x in row.items()})
    _write(out / "sweep.csv", buf.getvalue())
    return EXIT_OK


def cmd_stats(args) -> int:
    cfg = load_config(args.config)
    panel, _, plan, result = _run(cfg, args)
    u = panel.universe
    report = {
        **plan.mode.params(),
        "n_ids": u.n_ids,
        "n_steps": panel.n_steps,
        "predicted_unpruned_total": predicted_state_count(plan.mode, u.n_currencies, u.n_assets, panel.n_steps),
        "slots": [st.to_dict() for st in result.stats],
    }
    for q, st in enumerate(result.stats):
        print(f"q={q} total_states={st.total_states} total_unpruned={st.total_unpruned} wall_time_s={st.wall_time_s:.3f}")
    print(f"predicted_unpruned_total={report['predicted_unpruned_total']}")
    _write(_out_dir(cfg, args) / "stats.json", _dump(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hindsight", description="Hindsight-optimal trading trajectories")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--no-heuristics", action="store_true", help="disable state-pruning heuristics")
        p.add_argument("--sync", action="store_true", help="synchronous diversification")
        p.add_argument("--seed", type=int, help="seed for a 'synthetic' panel (fixture generation only)")
        return p

    common(sub.add_parser("optimize", help="solve and write reports and labels")).set_defaults(func=cmd_optimize)
    p = common(sub.add_parser("baseline", help="Buy-and-Hold baseline"))
    p.add_argument("--asset", type=int)
    p.set_defaults(func=cmd_baseline)
    p = common(sub.add_parser("sweep", help="optimize across proportional cost levels"))
    p.add_argument("--eps-pct", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0], help="levels in percent")
    p.set_defaults(func=cmd_sweep)
    common(sub.add_parser("stats", help="graph statistics")).set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OutputError, OSError) as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
