"""
Seeded experiment sweeps.

A sweep is a family (which scenario generator and which solvers), one
parameter grid, a seed list and an algorithm subset. Each (grid point, seed)
unit generates its scenario once and runs every requested algorithm on it,
so paired rows always share a ``scenario_hash``. Units may run in a process
pool capped by ``AGCO_THREADS``; rows are re-sorted by grid position, seed
and algorithm before writing, never by completion order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .charging import charging_to_dict, run_pctp, run_static
from .famt import solve_greedy_pt, solve_mt_mcmf
from .maft import WeightConfig, maft_to_dict, objective_bounds, pareto_flags, solve_w_grd, solve_w_ilp
from .model import content_hash, famt_to_dict
from .scenario import GenConfig, gen_charging, gen_famt, gen_maft

RAW_COLUMNS = (
    "family", "param", "value", "seed", "algorithm", "scenario_hash",
    "tasks_completed", "total_distance", "total_time", "objective", "pareto",
    "runtime_ms", "error",
)
AGGREGATE_COLUMNS = (
    "family", "param", "value", "algorithm", "n", "n_errors",
    "mean_tasks_completed", "mean_distance", "std_distance",
    "mean_time", "std_time", "mean_objective", "std_objective",
)

FAMT_ALGOS = {"mt-mcmf": solve_mt_mcmf, "mt-grdpt": solve_greedy_pt}
MAFT_ALGOS = {"w-ilp": solve_w_ilp, "w-grd": solve_w_grd}
CHARGING_ALGOS = {"pctp": run_pctp, "static": run_static}

# Grids and base settings per family. Where the source setups give no
# numbers these are our own choices and are labelled as such in metadata.
FAMILIES = {
    "vary_tasks": {
        "param": "n_tasks", "grid": [10, 15, 20, 25, 30], "algorithms": list(FAMT_ALGOS),
        "base": {"n_uav": 2, "n_ugv": 2, "q": 3},
    },
    "vary_agents": {
        "param": "n_agents", "grid": list(range(3, 12)), "algorithms": list(FAMT_ALGOS),
        "base": {"n_tasks": 20, "q": 3},
    },
    "vary_q": {
        "param": "q", "grid": [2, 3, 4, 5], "algorithms": list(FAMT_ALGOS),
        "base": {"n_uav": 2, "n_ugv": 2, "n_tasks": 20},
    },
    "vary_distribution": {
        "param": "distribution", "grid": ["compact", "hybrid", "scattered"],
        "algorithms": list(FAMT_ALGOS),
        "base": {"n_uav": 2, "n_ugv": 2, "n_tasks": 20, "q": 3},
    },
    "weight_sweep": {
        "param": "k_t", "grid": [0.0, 0.25, 0.5, 0.75, 1.0], "algorithms": list(MAFT_ALGOS),
        "base": {"maft_demand": 2},
    },
    "charging": {
        "param": "uavs_per_ugv", "grid": [1, 2, 3, 4, 5], "algorithms": list(CHARGING_ALGOS),
        "base": {"n_regions": 4, "dt": 0.1, "horizon": 600.0},
    },
}


@dataclass
class ExperimentSpec:
    family: str
    grid: list = None
    seeds: list = field(default_factory=lambda: list(range(20)))
    algorithms: list = None
    params: dict = field(default_factory=dict)
    output: str = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        fam = FAMILIES[self.family]
        if self.grid is None:
            self.grid = list(fam["grid"])
        if self.algorithms is None:
            self.algorithms = list(fam["algorithms"])
        if not self.grid:
            raise ValueError("parameter grid is empty")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        bad = set(self.algorithms) - set(fam["algorithms"])
        if bad or not self.algorithms:
            raise ValueError(f"algorithms {sorted(bad)} not valid for {self.family}")

    @property
    def param(self):
        return FAMILIES[self.family]["param"]

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "n_seeds" in d:
            d["seeds"] = list(range(int(d.pop("n_seeds"))))
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list
    aggregate: list
    metadata: dict

    @property
    def failed(self):
        return sum(1 for r in self.rows if r["error"])


def _row(spec, value, seed, algorithm, scenario_hash, **fields):
    row = dict.fromkeys(RAW_COLUMNS, "")
    row.update(family=spec.family, param=spec.param, value=value, seed=seed,
               algorithm=algorithm, scenario_hash=scenario_hash)
    row.update(fields)
    return row


def _gen_config(spec, value, seed):
    fam = FAMILIES[spec.family]
    settings = {**fam["base"], **spec.params}
    settings = {k: v for k, v in settings.items() if k in GenConfig.__dataclass_fields__}
    settings["seed"] = seed
    if spec.param == "n_agents":
        settings["n_uav"], settings["n_ugv"] = value // 2, value - value // 2
    else:
        settings[spec.param] = value
    return GenConfig(**settings)


def _famt_unit(spec, value, seed):
    scenario = gen_famt(_gen_config(spec, value, seed))
    h = content_hash(famt_to_dict(scenario))
    rows = []
    for algo in spec.algorithms:
        try:
            a = FAMT_ALGOS[algo](scenario)
            rows.append(_row(spec, value, seed, algo, h, tasks_completed=a.tasks_completed,
                             total_distance=a.total_distance, total_time=a.total_time,
                             runtime_ms=a.runtime_ms))
        except Exception as exc:  # noqa: BLE001 - recorded, sweep continues
            rows.append(_row(spec, value, seed, algo, h, error=f"{type(exc).__name__}: {exc}"))
    return rows


def _maft_unit(spec, seed):
    instance = gen_maft(_maft_config(spec, seed))
    h = content_hash(maft_to_dict(instance))
    rows = []
    try:
        bounds = objective_bounds(instance)
    except Exception as exc:  # noqa: BLE001
        err = f"{type(exc).__name__}: {exc}"
        return [_row(spec, v, seed, a, h, error=err) for v in spec.grid for a in spec.algorithms]
    for algo in spec.algorithms:
        algo_rows = []
        for value in spec.grid:
            try:
                a = MAFT_ALGOS[algo](instance, WeightConfig(float(value)), bounds)
                algo_rows.append(_row(spec, value, seed, algo, h, tasks_completed=int(a.x.sum()),
                                      total_distance=a.distance, total_time=a.time,
                                      objective=a.objective, runtime_ms=a.runtime_ms))
            except Exception as exc:  # noqa: BLE001
                algo_rows.append(_row(spec, value, seed, algo, h,
                                      error=f"{type(exc).__name__}: {exc}"))
        ok = [r for r in algo_rows if not r["error"]]
        for r, flag in zip(ok, pareto_flags([(r["total_time"], r["total_distance"]) for r in ok])):
            r["pareto"] = int(flag)
        rows.extend(algo_rows)
    return rows


def _maft_config(spec, seed):
    settings = {**FAMILIES[spec.family]["base"], **spec.params, "seed": seed}
    return GenConfig(**{k: v for k, v in settings.items() if k in GenConfig.__dataclass_fields__})


def _charging_unit(spec, value, seed):
    opts = {**FAMILIES["charging"]["base"], **spec.params}
    gen_opts = {k: v for k, v in opts.items() if k not in ("dt", "horizon")}
    scenarios = gen_charging(seed, int(value), **gen_opts)
    h = content_hash([charging_to_dict(s) for s in scenarios])
    rows = []
    for algo in spec.algorithms:
        try:
            started = time.perf_counter()
            results = [CHARGING_ALGOS[algo](s, opts["dt"], opts["horizon"]) for s in scenarios]
            charged = sum(sum(t is not None for t in r.charge_times.values()) for r in results)
            rows.append(_row(
                spec, value, seed, algo, h, tasks_completed=charged,
                total_distance=sum(r.total_distance for r in results),
                total_time=max(r.time_to_last_charge for r in results),
                runtime_ms=(time.perf_counter() - started) * 1000.0,
                error="" if all(r.complete for r in results) else "incomplete: UAV not charged",
            ))
        except Exception as exc:  # noqa: BLE001
            rows.append(_row(spec, value, seed, algo, h, error=f"{type(exc).__name__}: {exc}"))
    return rows


def _run_unit(args):
    spec, value, seed = args
    if spec.family == "weight_sweep":
        return _maft_unit(spec, seed)
    if spec.family == "charging":
        return _charging_unit(spec, value, seed)
    return _famt_unit(spec, value, seed)


def pool_size():
    env = os.environ.get("AGCO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _sort_key(spec):
    vpos = {json.dumps(v): i for i, v in enumerate(spec.grid)}
    apos = {a: i for i, a in enumerate(spec.algorithms)}
    return lambda r: (vpos[json.dumps(r["value"])], r["seed"], apos[r["algorithm"]])


def aggregate(rows):
    groups = {}
    for r in rows:
        groups.setdefault((r["family"], r["param"], json.dumps(r["value"]), r["algorithm"]), []).append(r)
    out = []
    for (family, param, value, algorithm), members in groups.items():
        ok = [r for r in members if not r["error"]]

        def stats(col):
            vals = [float(r[col]) for r in ok if r[col] != ""]
            if not vals:
                return math.nan, math.nan
            return statistics.fmean(vals), (statistics.stdev(vals) if len(vals) > 1 else 0.0)

        md, sd = stats("total_distance")
        mt, st = stats("total_time")
        mo, so = stats("objective")
        mc, _ = stats("tasks_completed")
        out.append({
            "family": family, "param": param, "value": json.loads(value), "algorithm": algorithm,
            "n": len(ok), "n_errors": len(members) - len(ok),
            "mean_tasks_completed": mc, "mean_distance": md, "std_distance": sd,
            "mean_time": mt, "std_time": st, "mean_objective": mo, "std_objective": so,
        })
    return out


def run_experiment(spec: ExperimentSpec, workers: int = None) -> ExperimentResult:
    values = [None] if spec.family == "weight_sweep" else spec.grid
    units = [(spec, v, s) for v in values for s in spec.seeds]
    workers = pool_size() if workers is None else workers
    if workers > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(units))) as pool:
            chunks = list(pool.map(_run_unit, units))
    else:
        chunks = [_run_unit(u) for u in units]
    rows = sorted((r for chunk in chunks for r in chunk), key=_sort_key(spec))
    meta = {
        "family": spec.family,
        "param": spec.param,
        "grid": spec.grid,
        "grid_source": "config default" if spec.grid == FAMILIES[spec.family]["grid"] else "spec file",
        "seeds": spec.seeds,
        "algorithms": spec.algorithms,
        "params": {**FAMILIES[spec.family]["base"], **spec.params},
    }
    return ExperimentResult(spec, rows, aggregate(rows), meta)


def write_csv(rows, path, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns))
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in columns})


def aggregate_path(path):
    root, ext = os.path.splitext(str(path))
    return f"{root}_aggregate{ext or '.csv'}"


def write_result(result: ExperimentResult, path, fmt="csv"):
    """Write raw rows to ``path`` and aggregates to the ``*_aggregate`` companion."""
    if fmt == "csv":
        write_csv(result.rows, path, RAW_COLUMNS)
        write_csv(result.aggregate, aggregate_path(path), AGGREGATE_COLUMNS)
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump({"metadata": result.metadata, "rows": result.rows}, fh, indent=2)
        with open(aggregate_path(path), "w") as fh:
            json.dump({"metadata": result.metadata, "aggregate": result.aggregate}, fh, indent=2)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def spec_to_dict(spec: ExperimentSpec) -> dict:
    return asdict(spec)
