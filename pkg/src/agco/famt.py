"""
Few-agents-more-tasks allocation.

Every agent must take exactly its ``task_limit`` (q) tasks, each task accepts
at most ``max_agents`` (p) agents, and an agent's visiting path may not exceed
its ``max_travel``. ``solve_mt_mcmf`` prices every q-subset of tasks for every
agent with an exact open-path tour, wires the layered flow network and hands
it to the chunked selection. ``solve_greedy_pt`` is the nearest-task baseline.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceTooLargeError
from .flow import FlowGraph, chunked_min_cost_selection
from .model import Agent, FamtScenario, euclidean_distance
from .tour import open_path_lengths, visiting_tour

ENUMERATION_CAP = 200_000


@dataclass(frozen=True)
class TaskSet:
    members: tuple  # task ids, in scenario order
    cost: float


@dataclass
class FamtAssignment:
    algorithm: str
    routes: dict  # agent id -> ordered task ids (empty when unassigned)
    distances: dict  # agent id -> meters
    tasks_completed: int = 0
    total_distance: float = 0.0
    total_time: float = 0.0  # minutes, distance / speed summed over agents
    runtime_ms: float = 0.0
    meta: dict = field(default_factory=dict)

    def unassigned(self):
        return [a for a, r in self.routes.items() if not r]


def _task_coords(scenario):
    return np.array([t.position.as_tuple() for t in scenario.tasks], dtype=float).reshape(-1, 3)


def _set_arrays(scenario, agent, cap, semantics):
    n = len(scenario.tasks)
    q = agent.task_limit
    if q > n:
        return np.zeros((0, q), dtype=int), np.zeros(0)
    count = math.comb(n, q)
    if count > cap:
        raise InstanceTooLargeError(n, q, count, cap)
    combos = np.array(list(itertools.combinations(range(n), q)), dtype=int).reshape(count, q)
    coords = _task_coords(scenario)
    start = np.array(agent.position.as_tuple())
    if semantics == "path":
        costs = open_path_lengths(start, coords, combos)
    elif semantics == "star":
        legs = np.sqrt(((coords - start) ** 2).sum(axis=1))
        costs = legs[combos].sum(axis=1)
    else:
        raise ValueError(f"unknown distance semantics {semantics!r}")
    keep = costs <= agent.max_travel
    return combos[keep], costs[keep]


def enumerate_feasible_sets(
    scenario: FamtScenario, agent: Agent, cap: int = ENUMERATION_CAP, semantics: str = "path"
) -> list:
    combos, costs = _set_arrays(scenario, agent, cap, semantics)
    ids = [t.id for t in scenario.tasks]
    return [TaskSet(tuple(ids[i] for i in c), float(w)) for c, w in zip(combos, costs)]


def _finish(algorithm, scenario, routes, distances, started, meta=None):
    speed = {a.id: a.speed for a in scenario.agents}
    return FamtAssignment(
        algorithm=algorithm,
        routes=routes,
        distances=distances,
        tasks_completed=sum(len(r) for r in routes.values()),
        total_distance=float(sum(distances.values())),
        total_time=float(sum(distances[a] / speed[a] for a in distances)),
        runtime_ms=(time.perf_counter() - started) * 1000.0,
        meta=meta or {},
    )


def build_network(scenario: FamtScenario, cap: int = ENUMERATION_CAP, semantics: str = "path"):
    """Layered flow network for a scenario.

    Returns (graph, agent_nodes, set_nodes, set_members) where set_members
    maps a set node to its task indices.
    """
    agents, tasks = scenario.agents, scenario.tasks
    per_agent = [_set_arrays(scenario, a, cap, semantics) for a in agents]
    set_index = {}
    for combos, _ in per_agent:
        for c in map(tuple, combos.tolist()):
            if c not in set_index:
                set_index[c] = len(set_index)
    n_agents, n_sets, n_tasks = len(agents), len(set_index), len(tasks)
    first_agent, first_set = 2, 2 + n_agents
    first_task = first_set + n_sets
    graph = FlowGraph(first_task + n_tasks, source=0, sink=1)
    graph.labels.update({0: "source", 1: "sink"})
    agent_nodes = list(range(first_agent, first_set))
    for node, agent in zip(agent_nodes, agents):
        graph.labels[node] = agent.id
        graph.add_edge(0, node, agent.task_limit, 0.0)
    for node, agent, (combos, costs) in zip(agent_nodes, agents, per_agent):
        for c, w in zip(map(tuple, combos.tolist()), costs.tolist()):
            graph.add_edge(node, first_set + set_index[c], agent.task_limit, w)
    set_members = {}
    for c, i in set_index.items():
        node = first_set + i
        set_members[node] = c
        for t in c:
            graph.add_edge(node, first_task + t, tasks[t].max_agents, 0.0)
    for t, task in enumerate(tasks):
        graph.labels[first_task + t] = task.id
        graph.add_edge(first_task + t, 1, task.max_agents, 0.0)
    return graph, agent_nodes, list(set_members), set_members


def solve_mt_mcmf(
    scenario: FamtScenario,
    cap: int = ENUMERATION_CAP,
    semantics: str = "path",
    preserve_max_count: bool = True,
) -> FamtAssignment:
    started = time.perf_counter()
    routes = {a.id: () for a in scenario.agents}
    distances = {a.id: 0.0 for a in scenario.agents}
    if not scenario.agents or not scenario.tasks:
        return _finish("mt-mcmf", scenario, routes, distances, started)

    graph, agent_nodes, set_nodes, members = build_network(scenario, cap, semantics)
    result = chunked_min_cost_selection(
        graph, None, agent_nodes, set_nodes, preserve_max_count=preserve_max_count
    )
    agent_of = dict(zip(agent_nodes, scenario.agents))
    for a_node, s_node in result.selections:
        agent = agent_of[a_node]
        idx = members[s_node]
        stops = [scenario.tasks[i].position for i in idx]
        tour = visiting_tour(agent.position, stops, semantics)
        routes[agent.id] = tuple(scenario.tasks[idx[k]].id for k in tour.order)
        distances[agent.id] = tour.length
    meta = {"count_guard": result.count_guard, "n_set_nodes": len(set_nodes)}
    return _finish("mt-mcmf", scenario, routes, distances, started, meta)


def solve_greedy_pt(scenario: FamtScenario) -> FamtAssignment:
    """Each agent in turn walks to its nearest open task until it holds q tasks.

    An agent that cannot reach q tasks within its travel budget keeps none
    (every agent must take exactly q) and its tentative tasks are released.
    """
    started = time.perf_counter()
    load = [0] * len(scenario.tasks)
    routes, distances = {}, {}
    for agent in scenario.agents:
        here = agent.position
        taken, travelled = [], 0.0
        while len(taken) < agent.task_limit:
            best = None
            for i, task in enumerate(scenario.tasks):
                if load[i] >= task.max_agents or i in taken:
                    continue
                d = euclidean_distance(here, task.position)
                if best is None or d < best[0]:
                    best = (d, i)
            if best is None or travelled + best[0] > agent.max_travel:
                break
            travelled += best[0]
            taken.append(best[1])
            here = scenario.tasks[best[1]].position
        if len(taken) == agent.task_limit:
            for i in taken:
                load[i] += 1
            routes[agent.id] = tuple(scenario.tasks[i].id for i in taken)
            distances[agent.id] = travelled
        else:
            routes[agent.id] = ()
            distances[agent.id] = 0.0
    return _finish("mt-grdpt", scenario, routes, distances, started)


def route_length(scenario: FamtScenario, agent_id: str, route, semantics: str = "path") -> float:
    agent = next(a for a in scenario.agents if a.id == agent_id)
    pos = {t.id: t.position for t in scenario.tasks}
    if semantics == "star":
        return sum(euclidean_distance(agent.position, pos[t]) for t in route)
    total, here = 0.0, agent.position
    for t in route:
        total += euclidean_distance(here, pos[t])
        here = pos[t]
    return total


def famt_violations(scenario: FamtScenario, assignment: FamtAssignment, semantics="path", tol=1e-6):
    """Constraint violations of an assignment: exact q per assigned agent,
    per-task agent cap, per-agent travel budget, and distance bookkeeping."""
    problems = []
    tasks = {t.id: t for t in scenario.tasks}
    load = {t: 0 for t in tasks}
    for agent in scenario.agents:
        route = assignment.routes.get(agent.id, ())
        if route and len(route) != agent.task_limit:
            problems.append(f"{agent.id}: holds {len(route)} tasks, q = {agent.task_limit}")
        if len(set(route)) != len(route):
            problems.append(f"{agent.id}: repeats a task")
        for t in route:
            if t not in tasks:
                problems.append(f"{agent.id}: unknown task {t}")
            else:
                load[t] += 1
        d = route_length(scenario, agent.id, route, semantics)
        if d > agent.max_travel + tol:
            problems.append(f"{agent.id}: travels {d:.3f} > S = {agent.max_travel}")
        reported = assignment.distances.get(agent.id, 0.0)
        if abs(reported - d) > tol * max(1.0, d):
            problems.append(f"{agent.id}: reported distance {reported} != route length {d}")
    for t, n in load.items():
        if n > tasks[t].max_agents:
            problems.append(f"task {t}: {n} agents > p = {tasks[t].max_agents}")
    if assignment.tasks_completed != sum(len(r) for r in assignment.routes.values()):
        problems.append("tasks_completed disagrees with the routes")
    return problems


# -- serialization -------------------------------------------------------------

SUMMARY_COLUMNS = (
    "scenario_id", "algorithm", "M", "N", "q", "p",
    "tasks_completed", "total_distance", "runtime_ms",
)


def assignment_to_dict(a: FamtAssignment) -> dict:
    return {
        "schema_version": 1,
        "type": "famt_assignment",
        "algorithm": a.algorithm,
        "agents": [
            {"id": k, "tasks": list(r), "distance": a.distances[k]} for k, r in a.routes.items()
        ],
        "tasks_completed": a.tasks_completed,
        "total_distance": a.total_distance,
        "total_time": a.total_time,
        "runtime_ms": a.runtime_ms,
        "meta": a.meta,
    }


def summary_row(scenario: FamtScenario, a: FamtAssignment, scenario_id: str = "") -> dict:
    qs = sorted({ag.task_limit for ag in scenario.agents})
    ps = sorted({t.max_agents for t in scenario.tasks})
    fmt = lambda vals: vals[0] if len(vals) == 1 else "/".join(map(str, vals))  # noqa: E731
    return {
        "scenario_id": scenario_id or scenario.name,
        "algorithm": a.algorithm,
        "M": len(scenario.agents),
        "N": len(scenario.tasks),
        "q": fmt(qs) if qs else "",
        "p": fmt(ps) if ps else "",
        "tasks_completed": a.tasks_completed,
        "total_distance": a.total_distance,
        "runtime_ms": a.runtime_ms,
    }
