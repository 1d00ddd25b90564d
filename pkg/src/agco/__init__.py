"""Heterogeneous air-ground multi-agent task allocation for mobile crowdsensing."""

from .charging import ChargingScenario, SimResult, Uav, run_pctp, run_static, ugv_direction, ugv_speed
from .famt import FamtAssignment, enumerate_feasible_sets, solve_greedy_pt, solve_mt_mcmf
from .flow import FlowGraph, FlowResult, chunked_min_cost_selection, min_cost_max_flow
from .maft import (
    MaftAssignment,
    MaftInstance,
    Region,
    WeightConfig,
    group_tasks_kmeans,
    normalize,
    objective_bounds,
    pareto_sweep,
    solve_w_grd,
    solve_w_ilp,
)
from .model import (
    Agent,
    AgentKind,
    FamtScenario,
    Position,
    Task,
    capability_coefficient,
    effectiveness,
    euclidean_distance,
)
from .scenario import Distribution, GenConfig, GeoRecord, gen_charging, gen_famt, gen_maft, ingest_geo
from .tour import Tour, heuristic_open_path, shortest_open_path

__version__ = "0.1.0"
