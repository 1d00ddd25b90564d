import csv
import json
import subprocess
import sys

import pytest

from agco import bench
from agco.bench import AGGREGATE_COLUMNS, RAW_COLUMNS, ExperimentSpec, run_experiment, write_result
from agco.cli import main

GOLDEN_RAW = ("family,param,value,seed,algorithm,scenario_hash,tasks_completed,total_distance,"
              "total_time,objective,pareto,runtime_ms,error")
GOLDEN_AGG = ("family,param,value,algorithm,n,n_errors,mean_tasks_completed,mean_distance,"
              "std_distance,mean_time,std_time,mean_objective,std_objective")


def strip_runtime(rows):
    return [{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows]


def test_golden_headers(tmp_path):
    assert ",".join(RAW_COLUMNS) == GOLDEN_RAW
    assert ",".join(AGGREGATE_COLUMNS) == GOLDEN_AGG
    spec = ExperimentSpec("vary_tasks", grid=[10], seeds=[0])
    out = tmp_path / "r.csv"
    write_result(run_experiment(spec, workers=1), out)
    assert out.read_text().splitlines()[0] == GOLDEN_RAW
    assert (tmp_path / "r_aggregate.csv").read_text().splitlines()[0] == GOLDEN_AGG


def test_row_counts_and_pairing():
    spec = ExperimentSpec("vary_tasks", seeds=[0, 1])
    res = run_experiment(spec, workers=1)
    assert len(res.rows) == 5 * 2 * 2 and res.failed == 0
    pairs = {}
    for r in res.rows:
        pairs.setdefault((r["value"], r["seed"]), []).append(r)
    for members in pairs.values():
        assert [m["algorithm"] for m in members] == ["mt-mcmf", "mt-grdpt"]
        assert len({m["scenario_hash"] for m in members}) == 1
    assert len(res.aggregate) == 5 * 2
    assert all(a["n"] == 2 for a in res.aggregate)


def test_weight_sweep_rows():
    res = run_experiment(ExperimentSpec("weight_sweep", seeds=[1]), workers=1)
    assert len(res.rows) == 5 * 2 and res.failed == 0
    ilp = [r for r in res.rows if r["algorithm"] == "w-ilp"]
    assert [r["value"] for r in ilp] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert all(r["pareto"] in (0, 1) for r in res.rows)


def test_charging_rows_paired():
    res = run_experiment(ExperimentSpec("charging", grid=[1, 2], seeds=[0]), workers=1)
    assert [(r["value"], r["algorithm"]) for r in res.rows] == [
        (1, "pctp"), (1, "static"), (2, "pctp"), (2, "static")]
    assert res.rows[0]["scenario_hash"] == res.rows[1]["scenario_hash"]
    assert res.rows[2]["tasks_completed"] == 8


def test_rerun_is_identical_across_pool_sizes():
    spec = ExperimentSpec("vary_q", grid=[2, 3], seeds=[0, 1, 2])
    a = run_experiment(spec, workers=1)
    b = run_experiment(spec, workers=2)
    assert strip_runtime(a.rows) == strip_runtime(b.rows)


def test_failures_recorded_not_raised():
    spec = ExperimentSpec("weight_sweep", seeds=[0], params={"maft_demand": 5})
    res = run_experiment(spec, workers=1)
    assert res.failed == len(res.rows) == 10
    assert all(r["error"].startswith("InfeasibleError") for r in res.rows)
    assert all(a["n_errors"] == 1 and a["n"] == 0 for a in res.aggregate)


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        ExperimentSpec("nope")
    with pytest.raises(ValueError):
        ExperimentSpec("vary_q", grid=[])
    with pytest.raises(ValueError):
        ExperimentSpec("vary_q", seeds=[])
    with pytest.raises(ValueError):
        ExperimentSpec("vary_q", algorithms=["w-ilp"])
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"family": "charging", "n_seeds": 3, "grid": [2]}))
    spec = ExperimentSpec.load(path)
    assert spec.seeds == [0, 1, 2] and bench.spec_to_dict(spec)["grid"] == [2]


def test_pool_size_env(monkeypatch):
    monkeypatch.setenv("AGCO_THREADS", "3")
    assert bench.pool_size() == 3
    monkeypatch.delenv("AGCO_THREADS")
    assert bench.pool_size() >= 1


# -- command line ------------------------------------------------------------


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--seed", "7", "--out", str(a)]) == 0
    assert main(["gen", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    for kind in ("maft", "charging"):
        assert main(["gen", "--kind", kind, "--seed", "7", "--out", str(a)]) == 0
        assert json.loads(a.read_text())["type"] == kind


def test_solve_famt_json(tmp_path):
    scen, out = tmp_path / "s.json", tmp_path / "a.json"
    main(["gen", "--seed", "3", "--n-tasks", "10", "--out", str(scen)])
    assert main(["solve-famt", "--algo", "mcmf", "--scenario", str(scen), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1 and doc["type"] == "famt_assignment"
    assert {"algorithm", "agents", "tasks_completed", "total_distance", "runtime_ms"} <= set(doc)
    for agent in doc["agents"]:
        assert {"id", "tasks", "distance"} <= set(agent)
    assert main(["solve-famt", "--algo", "greedy", "--scenario", str(scen),
                 "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert rows[0]["algorithm"] == "mt-grdpt"


def test_solve_maft_exit_codes(tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["solve-maft", "--seed", "1", "--kt", "0.25", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["weights"] == {"k_t": 0.25, "k_d": 0.75}
    # seed 0 at demand 2 cannot be staffed: solver error, not usage error
    assert main(["solve-maft", "--seed", "0"]) == 1
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["solve-maft", "--kt", "1.5"])
    assert exc.value.code == 2


def test_sim_charging(tmp_path):
    out, traj = tmp_path / "c.json", tmp_path / "t.csv"
    assert main(["sim-charging", "--seed", "2", "--out", str(out), "--trajectory", str(traj)]) == 0
    assert json.loads(out.read_text())["complete"] is True
    assert traj.read_text().startswith("t,entity,x,y,energy,state")
    assert main(["sim-charging", "--seed", "2", "--horizon", "0.5", "--out", str(out)]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["sim-charging", "--dt", "0"])
    assert exc.value.code == 2


def test_bench_command(tmp_path, monkeypatch):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"family": "vary_q", "grid": [2, 3], "seeds": [0, 1]}))
    out = tmp_path / "vq.csv"
    monkeypatch.setenv("AGCO_THREADS", "1")
    assert main(["bench", "--family", "vary_q", "--config", str(cfg), "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 2 * 2 * 2
    agg = list(csv.DictReader(open(tmp_path / "vq_aggregate.csv")))
    for q in ("2", "3"):
        m = {r["algorithm"]: float(r["mean_distance"]) for r in agg if r["value"] == q}
        assert m["mt-mcmf"] <= m["mt-grdpt"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "weight_sweep", "seeds": [0], "params": {"maft_demand": 5}}))
    assert main(["bench", "--family", "weight_sweep", "--config", str(bad),
                 "--out", str(tmp_path / "w.json"), "--format", "json"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--family", "vary_q", "--config", str(bad)])
    assert exc.value.code == 2


def test_usage_errors_exit_2():
    proc = subprocess.run([sys.executable, "-m", "agco", "solve-famt", "--bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "usage:" in proc.stderr
    help_text = subprocess.run([sys.executable, "-m", "agco", "bench", "--help"],
                               capture_output=True, text=True).stdout
    for flag in ("--family", "--config", "--seeds", "--workers", "--seed", "--out", "--format"):
        assert flag in help_text
