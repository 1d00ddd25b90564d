"""
More-agents-few-tasks allocation.

Agents are known only by region: each region has a representative position
and an inventory of UAVs and UGVs. Each task needs exactly ``max_agents``
(its demand p_j) agents, and only agent kinds whose capabilities strictly
dominate the task requirements may serve it. The decision variable is an
integer count per (region, kind, task).

Objectives are total travel distance and total travel time (distance over
the kind's speed). Both are min-max scaled between their single-objective
extremes and combined with weights k_t + k_d = 1.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bnb import solve_ilp
from .errors import InfeasibleError
from .flow import FlowGraph, min_cost_max_flow
from .model import (
    SCHEMA_VERSION,
    AgentKind,
    Position,
    Task,
    _check_schema,
    euclidean_distance,
    is_eligible,
    position_from_dict,
    position_to_dict,
    task_from_dict,
    task_to_dict,
)

KINDS = (AgentKind.UAV, AgentKind.UGV)


@dataclass(frozen=True)
class Region:
    id: str
    position: Position
    n_uav: int
    n_ugv: int
    uav_speed: float = 20.0
    ugv_speed: float = 5.0
    uav_capabilities: tuple = (1.0,)
    ugv_capabilities: tuple = (1.0,)

    def __post_init__(self):
        if self.n_uav < 0 or self.n_ugv < 0:
            raise ValueError(f"region {self.id}: inventory must be >= 0")
        if not (self.uav_speed > 0 and self.ugv_speed > 0):
            raise ValueError(f"region {self.id}: speeds must be > 0")
        object.__setattr__(self, "uav_capabilities", tuple(map(float, self.uav_capabilities)))
        object.__setattr__(self, "ugv_capabilities", tuple(map(float, self.ugv_capabilities)))

    @property
    def size(self):
        return self.n_uav + self.n_ugv

    def inventory(self, kind):
        return self.n_uav if AgentKind(kind) is AgentKind.UAV else self.n_ugv

    def speed(self, kind):
        return self.uav_speed if AgentKind(kind) is AgentKind.UAV else self.ugv_speed

    def capabilities(self, kind):
        return self.uav_capabilities if AgentKind(kind) is AgentKind.UAV else self.ugv_capabilities


class MaftInstance:
    """Regions plus tasks, with distance, time and eligibility tables.

    Arrays are indexed [region, kind, task] with kind 0 = UAV, 1 = UGV.
    """

    def __init__(self, regions, tasks, name="", meta=None):
        self.regions = tuple(regions)
        self.tasks = tuple(tasks)
        self.name = name
        self.meta = dict(meta or {})
        R, T = len(self.regions), len(self.tasks)
        self.distance = np.array(
            [[euclidean_distance(r.position, t.position) for t in self.tasks] for r in self.regions],
            dtype=float,
        ).reshape(R, T)
        speeds = np.array([[r.speed(k) for k in KINDS] for r in self.regions], dtype=float).reshape(R, 2)
        self.unit_distance = np.repeat(self.distance[:, None, :], 2, axis=1)
        self.unit_time = self.unit_distance / speeds[:, :, None]
        self.eligible = np.array(
            [[[is_eligible(r.capabilities(k), t.requirements) for t in self.tasks] for k in KINDS]
             for r in self.regions],
            dtype=bool,
        ).reshape(R, 2, T)
        self.inventory = np.array(
            [[r.n_uav, r.n_ugv] for r in self.regions], dtype=int
        ).reshape(R, 2)
        self.demand = np.array([t.max_agents for t in self.tasks], dtype=int)

    @property
    def shape(self):
        return (len(self.regions), 2, len(self.tasks))

    def feasibility_report(self):
        """None when every demand can be met, else a message naming the shortfall."""
        total_demand = int(self.demand.sum())
        total_supply = int(self.inventory.sum())
        if total_demand > total_supply:
            return f"total demand {total_demand} exceeds total inventory {total_supply}"
        for j, task in enumerate(self.tasks):
            supply = int((self.inventory * self.eligible[:, :, j]).sum())
            if supply < self.demand[j]:
                return (
                    f"task {task.id} needs {self.demand[j]} agents but only {supply} "
                    "eligible agents exist"
                )
        if _max_feasible_flow(self, self.inventory, self.demand) < total_demand:
            return "demands cannot be met jointly: eligible inventory is shared between tasks"
        return None

    @property
    def feasible(self):
        return self.feasibility_report() is None


def _max_feasible_flow(instance, inventory, demand):
    R, _, T = instance.shape
    graph = FlowGraph(2 + 2 * R + T, source=0, sink=1)
    for i in range(R):
        for k in range(2):
            node = 2 + 2 * i + k
            if inventory[i, k] > 0:
                graph.add_edge(0, node, int(inventory[i, k]))
            for j in range(T):
                if instance.eligible[i, k, j] and demand[j] > 0:
                    graph.add_edge(node, 2 + 2 * R + j, int(demand[j]))
    for j in range(T):
        if demand[j] > 0:
            graph.add_edge(2 + 2 * R + j, 1, int(demand[j]))
    return min_cost_max_flow(graph).total_flow


@dataclass(frozen=True)
class WeightConfig:
    k_t: float
    k_d: float = None

    def __post_init__(self):
        if self.k_d is None:
            object.__setattr__(self, "k_d", 1.0 - self.k_t)
        for w in (self.k_t, self.k_d):
            if not (0.0 <= w <= 1.0):
                raise ValueError(f"weights must lie in [0, 1], got {self.k_t}, {self.k_d}")
        if abs(self.k_t + self.k_d - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {self.k_t} + {self.k_d}")


@dataclass(frozen=True)
class ObjectiveBounds:
    d_min: float
    d_max: float
    t_min: float
    t_max: float


@dataclass
class MaftAssignment:
    algorithm: str
    x: np.ndarray  # (regions, 2, tasks) integer counts
    distance: float
    time: float
    objective: float
    weights: WeightConfig
    bounds: ObjectiveBounds
    nodes: int = 0
    gap: float = 0.0
    runtime_ms: float = 0.0
    meta: dict = field(default_factory=dict)


# spans below this fraction of the magnitude are rounding noise, not a real range
SPAN_RTOL = 1e-9


def _degenerate(lo, hi):
    return hi - lo <= SPAN_RTOL * max(1.0, abs(lo), abs(hi))


def normalize(value: float, lo: float, hi: float) -> float:
    if hi < lo:
        raise ValueError(f"normalization bounds reversed: max {hi} < min {lo}")
    if _degenerate(lo, hi):
        return 0.0
    return (value - lo) / (hi - lo)


# -- integer program -----------------------------------------------------------


def _constraints(instance):
    R, K, T = instance.shape
    n = R * K * T
    A_ub = np.zeros((R * K, n))
    for i in range(R):
        for k in range(K):
            row = i * K + k
            A_ub[row, row * T : (row + 1) * T] = 1.0
    b_ub = instance.inventory.reshape(-1).astype(float)
    A_eq = np.zeros((T, n))
    for j in range(T):
        A_eq[j, j::T] = 1.0
    b_eq = instance.demand.astype(float)
    upper = np.minimum(
        instance.eligible * instance.inventory[:, :, None],
        instance.demand[None, None, :],
    ).reshape(-1).astype(float)
    return A_ub, b_ub, A_eq, b_eq, upper


def _solve(instance, cost, node_limit):
    report = instance.feasibility_report()
    if report:
        raise InfeasibleError(report)
    A_ub, b_ub, A_eq, b_eq, upper = _constraints(instance)
    return solve_ilp(cost.reshape(-1), A_ub, b_ub, A_eq, b_eq, upper=upper, node_limit=node_limit)


def objective_bounds(instance: MaftInstance, node_limit: int = 1_000_000) -> ObjectiveBounds:
    """Single-objective extremes of total distance and total time over the feasible set."""
    dist, tim = instance.unit_distance, instance.unit_time
    d_min = _solve(instance, dist, node_limit).objective
    d_max = -_solve(instance, -dist, node_limit).objective
    t_min = _solve(instance, tim, node_limit).objective
    t_max = -_solve(instance, -tim, node_limit).objective
    return ObjectiveBounds(d_min, max(d_max, d_min), t_min, max(t_max, t_min))


def _unit_costs(instance, weights, bounds):
    d_span = bounds.d_max - bounds.d_min
    t_span = bounds.t_max - bounds.t_min
    cost = np.zeros(instance.shape)
    if not _degenerate(bounds.t_min, bounds.t_max):
        cost = cost + weights.k_t * instance.unit_time / t_span
    if not _degenerate(bounds.d_min, bounds.d_max):
        cost = cost + weights.k_d * instance.unit_distance / d_span
    return cost


def _assemble(algorithm, instance, x, weights, bounds, started, **extra):
    distance = float((instance.unit_distance * x).sum())
    tim = float((instance.unit_time * x).sum())
    objective = weights.k_t * normalize(tim, bounds.t_min, bounds.t_max) + weights.k_d * normalize(
        distance, bounds.d_min, bounds.d_max
    )
    return MaftAssignment(
        algorithm=algorithm, x=x, distance=distance, time=tim, objective=objective,
        weights=weights, bounds=bounds, runtime_ms=(time.perf_counter() - started) * 1000.0,
        **extra,
    )


def solve_w_ilp(instance: MaftInstance, weights: WeightConfig, bounds: ObjectiveBounds = None,
                node_limit: int = 1_000_000) -> MaftAssignment:
    started = time.perf_counter()
    if bounds is None:
        bounds = objective_bounds(instance, node_limit)
    res = _solve(instance, _unit_costs(instance, weights, bounds), node_limit)
    x = res.x.reshape(instance.shape)
    return _assemble("w-ilp", instance, x, weights, bounds, started, nodes=res.nodes, gap=res.gap)


def solve_w_grd(instance: MaftInstance, weights: WeightConfig,
                bounds: ObjectiveBounds = None) -> MaftAssignment:
    """Assign one agent at a time to the cheapest (region, kind, task) triple.

    A unit is only committed if the remaining demand can still be met by the
    remaining eligible inventory (checked with a max flow); otherwise the
    next-cheapest triple is tried.
    """
    started = time.perf_counter()
    report = instance.feasibility_report()
    if report:
        raise InfeasibleError(report)
    if bounds is None:
        bounds = objective_bounds(instance)
    cost = _unit_costs(instance, weights, bounds)
    R, K, T = instance.shape
    ranked = sorted(
        (cost[i, k, j], i, k, j)
        for i in range(R) for k in range(K) for j in range(T)
        if instance.eligible[i, k, j]
    )
    inv = instance.inventory.copy()
    need = instance.demand.copy()
    x = np.zeros(instance.shape, dtype=int)
    remaining = int(need.sum())
    while remaining:
        for _c, i, k, j in ranked:
            if inv[i, k] == 0 or need[j] == 0:
                continue
            inv[i, k] -= 1
            need[j] -= 1
            if remaining == 1 or _max_feasible_flow(instance, inv, need) == remaining - 1:
                x[i, k, j] += 1
                remaining -= 1
                break
            inv[i, k] += 1
            need[j] += 1
        else:
            raise InfeasibleError("greedy assignment stalled with unmet demand")
    return _assemble("w-grd", instance, x, weights, bounds, started)


def maft_violations(instance: MaftInstance, assignment: MaftAssignment):
    x = assignment.x
    problems = []
    if x.shape != instance.shape:
        return [f"assignment shape {x.shape} != {instance.shape}"]
    if np.any(x < 0) or not np.issubdtype(x.dtype, np.integer):
        problems.append("counts must be non-negative integers")
    used = x.sum(axis=2)
    for i, region in enumerate(instance.regions):
        for k, kind in enumerate(KINDS):
            if used[i, k] > instance.inventory[i, k]:
                problems.append(
                    f"region {region.id}: {used[i, k]} {kind.value}s used, "
                    f"{instance.inventory[i, k]} available"
                )
    got = x.sum(axis=(0, 1))
    for j, task in enumerate(instance.tasks):
        if got[j] != instance.demand[j]:
            problems.append(f"task {task.id}: receives {got[j]} agents, needs {instance.demand[j]}")
    if np.any(x[~instance.eligible] > 0):
        problems.append("agents assigned to tasks they are not eligible for")
    return problems


# -- grouping ------------------------------------------------------------------


def _xyz(points):
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
        return arr.reshape(len(arr), -1) if arr.size else arr.reshape(0, 3)
    return np.array([p.as_tuple() for p in points], dtype=float).reshape(-1, 3)


def nearest_seed_labels(points, seeds) -> np.ndarray:
    pts, cen = _xyz(points), _xyz(seeds)
    if len(pts) == 0:
        return np.zeros(0, dtype=int)
    d2 = ((pts[:, None, :] - cen[None, :, :]) ** 2).sum(axis=-1)
    return d2.argmin(axis=1)


def group_tasks_kmeans(points, k: int, seeds, max_iter: int = 100) -> np.ndarray:
    """Lloyd's k-means started from ``seeds`` (e.g. UGV positions).

    Stops at a fixed point or after ``max_iter`` iterations; a cluster that
    empties keeps its previous centroid.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    centroids = _xyz(seeds)
    if len(centroids) != k:
        raise ValueError(f"expected {k} seeds, got {len(centroids)}")
    pts = _xyz(points)
    if len(pts) == 0:
        return np.zeros(0, dtype=int)
    labels = nearest_seed_labels(pts, centroids)
    for _ in range(max_iter):
        for c in range(k):
            members = pts[labels == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
        new = nearest_seed_labels(pts, centroids)
        if np.array_equal(new, labels):
            break
        labels = new
    return labels


def within_cluster_ss(points, labels) -> float:
    pts = _xyz(points)
    total = 0.0
    for c in np.unique(labels):
        members = pts[labels == c]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def group_uavs_to_ugvs(uav_positions, ugv_positions, method: str = "kmeans") -> np.ndarray:
    """Index of the UGV each UAV recharges at."""
    if method == "nearest":
        return nearest_seed_labels(uav_positions, ugv_positions)
    if method == "kmeans":
        return group_tasks_kmeans(uav_positions, len(ugv_positions), ugv_positions)
    raise ValueError(f"unknown grouping method {method!r}")


# -- weight sweep --------------------------------------------------------------


@dataclass
class SweepPoint:
    k_t: float
    k_d: float
    time: float = math.nan
    distance: float = math.nan
    objective: float = math.nan
    pareto: bool = False
    error: str = ""
    assignment: MaftAssignment = None


def pareto_flags(points, tol=1e-9):
    """True for every (time, distance) pair not dominated by another pair."""
    flags = []
    for a in points:
        dominated = any(
            b[0] <= a[0] + tol and b[1] <= a[1] + tol and (b[0] < a[0] - tol or b[1] < a[1] - tol)
            for b in points
        )
        flags.append(not dominated)
    return flags


def pareto_sweep(instance: MaftInstance, grid, node_limit: int = 1_000_000) -> list:
    """One W-ILP solve per weight; grid entries are k_t values or WeightConfigs."""
    weights = [g if isinstance(g, WeightConfig) else WeightConfig(float(g)) for g in grid]
    if not weights:
        raise ValueError("weight grid is empty")
    out = [SweepPoint(w.k_t, w.k_d) for w in weights]
    try:
        bounds = objective_bounds(instance, node_limit)
    except Exception as exc:  # noqa: BLE001 - reported per point
        for p in out:
            p.error = f"{type(exc).__name__}: {exc}"
        return out
    for p, w in zip(out, weights):
        try:
            a = solve_w_ilp(instance, w, bounds, node_limit)
        except Exception as exc:  # noqa: BLE001
            p.error = f"{type(exc).__name__}: {exc}"
            continue
        p.time, p.distance, p.objective, p.assignment = a.time, a.distance, a.objective, a
    ok = [p for p in out if not p.error]
    for p, flag in zip(ok, pareto_flags([(p.time, p.distance) for p in ok])):
        p.pareto = flag
    return out


# -- serialization -------------------------------------------------------------


def region_to_dict(r: Region) -> dict:
    return {
        "id": r.id,
        "position": position_to_dict(r.position),
        "n_uav": r.n_uav,
        "n_ugv": r.n_ugv,
        "uav_speed": r.uav_speed,
        "ugv_speed": r.ugv_speed,
        "uav_capabilities": list(r.uav_capabilities),
        "ugv_capabilities": list(r.ugv_capabilities),
    }


def region_from_dict(d) -> Region:
    return Region(
        id=str(d["id"]),
        position=position_from_dict(d["position"]),
        n_uav=int(d["n_uav"]),
        n_ugv=int(d["n_ugv"]),
        uav_speed=float(d.get("uav_speed", 20.0)),
        ugv_speed=float(d.get("ugv_speed", 5.0)),
        uav_capabilities=tuple(d["uav_capabilities"]),
        ugv_capabilities=tuple(d["ugv_capabilities"]),
    )


def maft_to_dict(inst: MaftInstance) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "maft",
        "name": inst.name,
        "meta": inst.meta,
        "regions": [region_to_dict(r) for r in inst.regions],
        "tasks": [task_to_dict(t) for t in inst.tasks],
    }


def maft_from_dict(d) -> MaftInstance:
    _check_schema(d, "maft")
    return MaftInstance(
        [region_from_dict(r) for r in d["regions"]],
        [task_from_dict(t) for t in d["tasks"]],
        name=d.get("name", ""),
        meta=d.get("meta", {}),
    )


def maft_assignment_to_dict(inst: MaftInstance, a: MaftAssignment) -> dict:
    counts = []
    R, K, T = inst.shape
    for i in range(R):
        for k in range(K):
            for j in range(T):
                if a.x[i, k, j]:
                    counts.append({
                        "region": inst.regions[i].id,
                        "kind": KINDS[k].value,
                        "task": inst.tasks[j].id,
                        "count": int(a.x[i, k, j]),
                    })
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "maft_assignment",
        "algorithm": a.algorithm,
        "weights": {"k_t": a.weights.k_t, "k_d": a.weights.k_d},
        "counts": counts,
        "distance": a.distance,
        "time": a.time,
        "objective": a.objective,
        "bounds": vars(a.bounds),
        "nodes": a.nodes,
        "gap": a.gap,
        "runtime_ms": a.runtime_ms,
    }


def task_for(id, x, y, demand, requirements=(1.0,)):
    """Convenience constructor for a MAFT task (demand stored as max_agents)."""
    return Task(id, Position(x, y, 0.0), requirements, demand)
