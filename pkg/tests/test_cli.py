import csv
import io
import json
from pathlib import Path

import pytest

from hindsight.cli import main

W1_ROWS = [("2020-01-01", 100), ("2020-01-02", 110), ("2020-01-03", 105), ("2020-01-06", 115)]


def write_w1(tmp_path: Path, **extra) -> Path:
    data = tmp_path / "asset.csv"
    data.write_text("date,adj_close\n" + "".join(f"{d},{p}\n" for d, p in W1_ROWS))
    cfg = {
        "data": [{"id": 1, "path": "asset.csv", "kind": "asset", "currency": 0, "name": "W1"}],
        "m0": 1000,
        "output_dir": "out",
        **extra,
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return path


def synthetic_cfg(tmp_path: Path, **extra) -> Path:
    cfg = {
        "synthetic": {"n_currencies": 2, "n_assets": 4, "n_steps": 40, "seed": 5},
        "costs": {"eps": 0.002, "beta": 1.0},
        "m0": 100000,
        **extra,
    }
    path = tmp_path / "syn.json"
    path.write_text(json.dumps(cfg))
    return path


def test_optimize_w1(tmp_path, capsys):
    cfg = write_w1(tmp_path)
    assert main(["optimize", "--config", str(cfg)]) == 0
    assert "q=0 r_total=20.0 K_total=3 D_min=1" in capsys.readouterr().out
    out = tmp_path / "out"
    report = json.loads((out / "report_q0.json").read_text())
    assert report["e"] == [20.0, 3, 1]
    labels = list(csv.DictReader(io.StringIO((out / "labels_q0.csv").read_text())))
    assert [int(r["asset_id"]) for r in labels] == [0, 1, 0, 1]
    assert (out / "summary.json").exists() and (out / "stats_q0.json").exists()


def test_optimize_is_byte_deterministic(tmp_path):
    cfg = synthetic_cfg(tmp_path, diversification={"Q": 3})
    assert main(["optimize", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["optimize", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    for name in ["report_q0.json", "report_q2.json", "labels_q1.csv", "summary.json"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_baseline(tmp_path, capsys):
    cfg = write_w1(tmp_path)
    assert main(["baseline", "--config", str(cfg), "--asset", "1"]) == 0
    assert "r_total=15.0" in capsys.readouterr().out


def test_baseline_rejects_currency_id(tmp_path):
    assert main(["baseline", "--config", str(write_w1(tmp_path)), "--asset", "0"]) == 2


def test_missing_data_file_exits_2(tmp_path, capsys):
    cfg = write_w1(tmp_path)
    (tmp_path / "asset.csv").unlink()
    assert main(["optimize", "--config", str(cfg)]) == 2
    assert "data file not found" in capsys.readouterr().err


def test_missing_config_exits_2(tmp_path):
    assert main(["optimize", "--config", str(tmp_path / "nope.json")]) == 2


def test_q_too_large_exits_2(tmp_path):
    assert main(["optimize", "--config", str(write_w1(tmp_path, diversification={"Q": 3}))]) == 2


def test_negative_cost_exits_2(tmp_path):
    assert main(["optimize", "--config", str(write_w1(tmp_path, costs={"eps": -0.1}))]) == 2


def test_unknown_key_exits_2(tmp_path):
    assert main(["optimize", "--config", str(write_w1(tmp_path, colour="red"))]) == 2


def test_infeasible_exits_3(tmp_path):
    cfg = write_w1(tmp_path, m0=10, diversification={"Q": 2, "constrained_times": [None, [1]]})
    # slot 0 stays in cash with 5 units; slot 1 cannot afford the asset at t=1
    assert main(["optimize", "--config", str(cfg)]) == 3


def test_unwritable_output_exits_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["optimize", "--config", str(write_w1(tmp_path)), "--out", str(blocker / "sub")]) == 4


def test_sweep_rows_non_increasing(tmp_path, capsys):
    cfg = synthetic_cfg(tmp_path)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "sw")]) == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "sw" / "sweep.csv").read_text())))
    assert [float(r["eps_pct"]) for r in rows] == [0.0, 0.5, 1.0, 2.0]
    r = [float(row["r_q0"]) for row in rows]
    assert all(a >= b for a, b in zip(r, r[1:]))
    assert (tmp_path / "sw" / "eps_0.5" / "summary.json").exists()


def test_stats(tmp_path, capsys):
    cfg = synthetic_cfg(tmp_path, mode={"type": "max_trades", "K": 3})
    assert main(["stats", "--config", str(cfg), "--out", str(tmp_path / "st"), "--no-heuristics"]) == 0
    stats = json.loads((tmp_path / "st" / "stats.json").read_text())
    assert stats["predicted_unpruned_total"] == stats["slots"][0]["total_unpruned"]


def test_sync_flag(tmp_path, capsys):
    cfg = synthetic_cfg(tmp_path, diversification={"Q": 2})
    assert main(["optimize", "--config", str(cfg), "--sync", "--out", str(tmp_path / "s")]) == 0
    summary = json.loads((tmp_path / "s" / "summary.json").read_text())
    assert summary["sync"] is True
    assert "summary_return=" in capsys.readouterr().out


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        main([])
