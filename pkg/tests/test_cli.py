import csv
import json
import subprocess
import sys

import pytest

from droopalloc.allocation.sweep import apply_overrides
from droopalloc.caselib import load_builtin, serialize
from droopalloc.cli import csv_text, dumps, main


def _read(path):
    return path.read_text(encoding="utf-8")


def test_equilibrium_writes_json_and_manifest(tmp_path):
    assert main(["equilibrium", "base", "--out", str(tmp_path)]) == 0
    eq = json.loads(_read(tmp_path / "equilibrium.json"))
    assert eq["residual"] <= 1e-9
    man = json.loads(_read(tmp_path / "manifest.json"))
    assert man["command"] == "equilibrium" and man["exit_code"] == 0
    assert man["artifacts"] == ["equilibrium.json"]
    assert {"wall_clock_s", "version", "options"} <= set(man)


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DROOPALLOC_OUT", str(tmp_path / "env"))
    assert main(["equilibrium", "base/gfm-gfm"]) == 0
    assert (tmp_path / "env" / "equilibrium.json").exists()


def test_optimize_artifacts_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["optimize", "base", "--starts", "4", "--grid-certify", "--grid-points", "8",
                     "--workers", "1", "--out", str(out)]) == 0
    for name in ("optimization.json", "iterations.csv", "grid.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    res = json.loads(_read(a / "optimization.json"))
    assert res["converged"] and len(res["gains"]) == 2
    with open(a / "grid.csv", newline="") as fh:
        assert len(list(csv.reader(fh))) == 8 * 8 + 1


def test_optimize_plots_when_asked(tmp_path):
    assert main(["optimize", "base", "--starts", "2", "--grid-certify", "--grid-points", "6",
                 "--workers", "1", "--plot", "--out", str(tmp_path)]) == 0
    pngs = sorted(p.name for p in tmp_path.glob("*.png"))
    assert pngs and all((tmp_path / p).read_bytes()[:4] == b"\x89PNG" for p in pngs)


def test_simulate_writes_trajectory(tmp_path):
    assert main(["simulate", "base/gfm-gfm", "--horizon", "1.0", "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "trajectory.csv").splitlines()
    assert rows[0].startswith("t,p_bus1,omega_bus1,vmag_bus1")
    summary = json.loads(_read(tmp_path / "summary.json"))
    assert summary["events"][0]["time"] == pytest.approx(0.1)


def test_input_errors_exit_2(tmp_path):
    assert main(["equilibrium", "no_such_case", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: 1\nbuses: {count: 0, slack: 1}\n")
    assert main(["equilibrium", str(bad), "--out", str(tmp_path)]) == 2
    assert json.loads(_read(tmp_path / "manifest.json"))["exit_code"] == 2
    assert main(["simulate", "base", "--disturbance", "garbage", "--out", str(tmp_path)]) == 2
    assert main(["equilibrium", "base", "--gains", "1,2,3", "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as info:
        main(["optimize"])
    assert info.value.code == 2


def test_unstable_seed_exits_3(tmp_path):
    case = apply_overrides(load_builtin("base"), [((1, "K_PLL_I"), -1.0), ((2, "K_PLL_I"), -1.0)])
    path = tmp_path / "unstable.yaml"
    path.write_text(serialize(case))
    assert main(["optimize", str(path), "--out", str(tmp_path)]) == 3


def test_integration_failure_exits_4(tmp_path):
    assert main(["simulate", "high_impedance/gfl-gfl", "--out", str(tmp_path)]) == 4


def test_allocate_and_sweep(tmp_path):
    assert main(["allocate", "low_impedance", "--starts", "2", "--out", str(tmp_path)]) == 0
    alloc = json.loads(_read(tmp_path / "allocation.json"))
    assert [b["bus"] for b in alloc["buses"]] == [1, 2]
    assert "label" in alloc["buses"][0]
    assert (tmp_path / "allocation.txt").exists()
    assert main(["sweep", "base", "--param", "bus1.K_PLL_I", "--range", "1:5:3",
                 "--workers", "1", "--out", str(tmp_path)]) == 0
    rows = _read(tmp_path / "sweep.csv").splitlines()
    assert rows[0].startswith("bus1.K_PLL_I,converged") and len(rows) == 4


def test_dumps_and_csv_helpers():
    assert json.loads(dumps({"b": float("nan"), "a": float("inf")})) == {"a": None, "b": None}
    assert csv_text(["x", "y"], [[0.1, True]]) .splitlines()[1].startswith("0.1,")


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "droopalloc.cli", "equilibrium", "base",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
