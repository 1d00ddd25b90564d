"""Command-line entry point: ``agco <command> [options]``.

Exit status is 0 on success, 1 when a solver reports an error (infeasible
instance, failed benchmark cell, ...) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import bench
from .charging import charging_from_dict, charging_to_dict, run_pctp, run_static, sim_summary, write_trajectory_csv
from .errors import AgcoError
from .famt import SUMMARY_COLUMNS, assignment_to_dict, solve_greedy_pt, solve_mt_mcmf, summary_row
from .maft import WeightConfig, maft_assignment_to_dict, maft_from_dict, maft_to_dict, solve_w_grd, solve_w_ilp
from .model import famt_from_dict, famt_to_dict
from .scenario import GenConfig, gen_charging, gen_famt, gen_maft


class UsageError(Exception):
    pass


def _common(p):
    p.add_argument("--seed", type=int, default=0, help="RNG seed for generated scenarios (default 0)")
    p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")
    p.add_argument("--format", choices=("csv", "json"),
                   help="output format (default json; bench follows the --out extension, else csv)")


def build_parser():
    parser = argparse.ArgumentParser(prog="agco", description="Air-ground multi-agent task allocation")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a scenario as JSON")
    _common(g)
    g.add_argument("--kind", choices=("famt", "maft", "charging"), default="famt",
                   help="which problem to generate (default famt)")
    g.add_argument("--distribution", choices=("compact", "scattered", "hybrid"), default="hybrid",
                   help="task placement for famt scenarios (default hybrid)")
    g.add_argument("--n-uav", type=int, default=2, help="UAV count for famt (default 2)")
    g.add_argument("--n-ugv", type=int, default=2, help="UGV count for famt (default 2)")
    g.add_argument("--n-tasks", type=int, default=20, help="task count for famt (default 20)")
    g.add_argument("--q", type=int, default=3,
                   help="tasks per agent; 0 draws each agent's q uniformly from 2..7 (default 3)")
    g.add_argument("--p", type=int, default=6, help="max agents per famt task (default 6)")
    g.add_argument("--demand", type=int, default=5, help="agents required per maft task (default 5)")
    g.add_argument("--uavs-per-ugv", type=int, default=3, help="UAVs per UGV for charging (default 3)")
    g.add_argument("--layout", choices=("cell", "centered"), default="cell",
                   help="charging placement: all agents uniform in the region cell, or UAVs "
                        "around a UGV at the cell center (default cell)")
    g.add_argument("--region", type=int, default=0, help="which of the 4 charging regions to emit (default 0)")

    f = sub.add_parser("solve-famt", help="allocate a few-agents-more-tasks scenario")
    _common(f)
    f.add_argument("--algo", choices=("mcmf", "greedy"), default="mcmf", help="solver (default mcmf)")
    f.add_argument("--scenario", help="scenario JSON; generated from --seed when omitted")
    f.add_argument("--semantics", choices=("path", "star"), default="path",
                   help="travel distance of a task set: chained path or star sum (default path)")

    m = sub.add_parser("solve-maft", help="allocate a more-agents-few-tasks instance")
    _common(m)
    m.add_argument("--algo", choices=("wilp", "wgrd"), default="wilp", help="solver (default wilp)")
    m.add_argument("--kt", type=float, default=0.5, help="weight of travel time, k_d = 1 - k_t (default 0.5)")
    m.add_argument("--scenario", help="instance JSON; generated from --seed when omitted")

    c = sub.add_parser("sim-charging", help="simulate UAV recharging rendezvous")
    _common(c)
    c.add_argument("--algo", choices=("pctp", "static"), default="pctp", help="UGV policy (default pctp)")
    c.add_argument("--scenario", help="charging scenario JSON; generated from --seed when omitted")
    c.add_argument("--dt", type=float, default=0.1, help="time step in minutes (default 0.1)")
    c.add_argument("--horizon", type=float, default=600.0, help="simulated minutes (default 600)")
    c.add_argument("--trajectory", help="also write the per-step trajectory CSV here")

    b = sub.add_parser("bench", help="run an experiment family over seeds")
    _common(b)
    b.add_argument("--family", required=True, choices=sorted(bench.FAMILIES), help="experiment family")
    b.add_argument("--config", help="experiment spec JSON (grid, seeds, algorithms, params)")
    b.add_argument("--seeds", type=int, help="use seeds 0..n-1 (overrides the config)")
    b.add_argument("--workers", type=int, help="process pool size (default AGCO_THREADS or CPU count)")
    return parser


def _emit(text, out):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _emit_rows(rows, columns, out):
    if out == "-":
        fh = sys.stdout
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return
    with open(out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns))
        w.writeheader()
        w.writerows(rows)


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_gen(args):
    if args.format == "csv":
        raise UsageError("gen writes JSON only")
    if args.kind == "famt":
        cfg = GenConfig(seed=args.seed, distribution=args.distribution, n_uav=args.n_uav,
                        n_ugv=args.n_ugv, n_tasks=args.n_tasks, q=args.q or None, p=args.p)
        doc = famt_to_dict(gen_famt(cfg))
    elif args.kind == "maft":
        doc = maft_to_dict(gen_maft(GenConfig(seed=args.seed, maft_demand=args.demand)))
    else:
        scenarios = gen_charging(args.seed, args.uavs_per_ugv, layout=args.layout)
        if not 0 <= args.region < len(scenarios):
            raise UsageError(f"--region must be in 0..{len(scenarios) - 1}")
        doc = charging_to_dict(scenarios[args.region])
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_solve_famt(args):
    scenario = famt_from_dict(_load(args.scenario)) if args.scenario else gen_famt(GenConfig(seed=args.seed))
    if args.algo == "mcmf":
        a = solve_mt_mcmf(scenario, semantics=args.semantics)
    else:
        a = solve_greedy_pt(scenario)
    if args.format != "csv":
        _emit(json.dumps(assignment_to_dict(a), indent=2) + "\n", args.out)
    else:
        _emit_rows([summary_row(scenario, a)], SUMMARY_COLUMNS, args.out)
    return 0


MAFT_SUMMARY = ("algorithm", "k_t", "k_d", "distance", "time", "objective", "nodes", "gap", "runtime_ms")


def cmd_solve_maft(args):
    if args.scenario:
        inst = maft_from_dict(_load(args.scenario))
    else:
        inst = gen_maft(GenConfig(seed=args.seed, maft_demand=2))
    try:
        w = WeightConfig(args.kt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    a = (solve_w_ilp if args.algo == "wilp" else solve_w_grd)(inst, w)
    doc = maft_assignment_to_dict(inst, a)
    if args.format != "csv":
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit_rows([{"k_t": w.k_t, "k_d": w.k_d, **{k: doc[k] for k in MAFT_SUMMARY if k in doc}}],
                   MAFT_SUMMARY, args.out)
    return 0


CHARGING_SUMMARY = ("algorithm", "total_distance", "time_to_last_charge", "complete", "steps")


def cmd_sim_charging(args):
    if args.dt <= 0:
        raise UsageError("--dt must be > 0")
    if args.scenario:
        scenario = charging_from_dict(_load(args.scenario))
    else:
        scenario = gen_charging(args.seed, 3)[0]
    run = run_pctp if args.algo == "pctp" else run_static
    result = run(scenario, args.dt, args.horizon, log=bool(args.trajectory))
    if args.trajectory:
        write_trajectory_csv(result, args.trajectory)
    summary = sim_summary(result)
    if args.format != "csv":
        _emit(json.dumps(summary, indent=2) + "\n", args.out)
    else:
        _emit_rows([{k: summary[k] for k in CHARGING_SUMMARY}], CHARGING_SUMMARY, args.out)
    return 0 if result.complete else 1


def cmd_bench(args):
    doc = _load(args.config) if args.config else {}
    doc.setdefault("family", args.family)
    if doc["family"] != args.family:
        raise UsageError(f"--family {args.family} disagrees with config family {doc['family']}")
    if args.seeds is not None:
        doc.pop("n_seeds", None)
        doc["seeds"] = list(range(args.seeds))
    try:
        spec = bench.ExperimentSpec.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad experiment spec: {exc}") from None
    result = bench.run_experiment(spec, workers=args.workers)
    fmt = args.format
    if fmt is None:
        target = args.out if args.out != "-" else (spec.output or "")
        fmt = "json" if target.endswith(".json") else "csv"
    out = args.out if args.out != "-" else (spec.output or f"{spec.family}.{fmt}")
    bench.write_result(result, out, fmt)
    print(f"{len(result.rows)} rows -> {out}, aggregates -> {bench.aggregate_path(out)}", file=sys.stderr)
    return 1 if result.failed else 0


COMMANDS = {
    "gen": cmd_gen,
    "solve-famt": cmd_solve_famt,
    "solve-maft": cmd_solve_maft,
    "sim-charging": cmd_sim_charging,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (AgcoError, ValueError, OSError) as exc:
        print(f"agco: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
