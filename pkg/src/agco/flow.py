"""
Minimum-cost flow machinery.

Two solvers share one graph type:

* ``min_cost_max_flow`` is textbook successive shortest paths with Johnson
  potentials (Dijkstra on reduced costs). It is exact and doubles as the
  oracle for the layered allocator network.
* ``chunked_min_cost_selection`` runs on the layered
  source -> agents -> task sets -> tasks -> sink network. An agent either
  takes a whole task set (q units, one per member task) or nothing, and the
  cheapest still-feasible (agent, set) pair is committed each round.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import GraphError, GraphShapeError

_EPS = 1e-12


class FlowGraph:
    """Directed graph with integer capacities and non-negative real per-unit costs."""

    def __init__(self, n_nodes: int, source: int, sink: int):
        if n_nodes < 2:
            raise GraphError("a flow graph needs at least a source and a sink")
        self.n_nodes = int(n_nodes)
        self._check_node(source)
        self._check_node(sink)
        if source == sink:
            raise GraphError("source and sink must differ")
        self.source, self.sink = source, sink
        self.tails: list[int] = []
        self.heads: list[int] = []
        self.caps: list[int] = []
        self.costs: list[float] = []
        self.labels: dict[int, str] = {}

    def _check_node(self, v):
        if not (0 <= v < self.n_nodes):
            raise GraphError(f"node id {v} outside [0, {self.n_nodes})")

    def add_edge(self, u: int, v: int, capacity: int, cost: float = 0.0) -> int:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        if int(capacity) != capacity or capacity < 0:
            raise GraphError(f"capacity must be a non-negative integer, got {capacity}")
        if not math.isfinite(cost) or cost < 0:
            raise GraphError(f"edge cost must be finite and >= 0, got {cost}")
        self.tails.append(u)
        self.heads.append(v)
        self.caps.append(int(capacity))
        self.costs.append(float(cost))
        return len(self.tails) - 1

    @property
    def n_edges(self):
        return len(self.tails)

    def edges(self):
        return list(zip(self.tails, self.heads, self.caps, self.costs))

    def out_edges(self):
        out = [[] for _ in range(self.n_nodes)]
        for e, u in enumerate(self.tails):
            out[u].append(e)
        return out

    def to_dot(self, flows=None) -> str:
        lines = ["digraph flow {", "  rankdir=LR;"]
        for v in range(self.n_nodes):
            name = self.labels.get(v, str(v))
            lines.append(f'  n{v} [label="{name}"];')
        for e, (u, v, cap, cost) in enumerate(self.edges()):
            f = f"{flows.get(e, 0)}/" if flows is not None else ""
            lines.append(f'  n{u} -> n{v} [label="{f}{cap} @ {cost:g}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass
class FlowResult:
    total_flow: int
    total_cost: float
    edge_flow: dict = field(default_factory=dict)  # edge index -> units
    selections: list = field(default_factory=list)  # chunked only: (agent node, set node)
    count_guard: str = "off"


def check_conservation(graph: FlowGraph, result: FlowResult):
    """Raise AssertionError when capacity or conservation is violated."""
    balance = [0] * graph.n_nodes
    for e, f in result.edge_flow.items():
        if not (0 <= f <= graph.caps[e]):
            raise AssertionError(f"edge {e} carries {f} outside [0, {graph.caps[e]}]")
        balance[graph.tails[e]] -= f
        balance[graph.heads[e]] += f
    for v, b in enumerate(balance):
        if v in (graph.source, graph.sink):
            continue
        if b != 0:
            raise AssertionError(f"flow not conserved at node {v} (imbalance {b})")
    if -balance[graph.source] != result.total_flow or balance[graph.sink] != result.total_flow:
        raise AssertionError("source outflow / sink inflow disagree with total flow")


def min_cost_max_flow(graph: FlowGraph) -> FlowResult:
    n = graph.n_nodes
    # residual arcs: 2e forward, 2e+1 backward
    m = graph.n_edges
    head = [0] * (2 * m)
    cap = [0] * (2 * m)
    cost = [0.0] * (2 * m)
    adj = [[] for _ in range(n)]
    for e, (u, v, c, w) in enumerate(graph.edges()):
        head[2 * e], cap[2 * e], cost[2 * e] = v, c, w
        head[2 * e + 1], cap[2 * e + 1], cost[2 * e + 1] = u, 0, -w
        adj[u].append(2 * e)
        adj[v].append(2 * e + 1)

    s, t = graph.source, graph.sink
    potential = [0.0] * n  # valid start: all forward costs are >= 0
    total_flow = 0
    inf = math.inf
    while True:
        dist = [inf] * n
        via = [-1] * n
        dist[s] = 0.0
        heap = [(0.0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for a in adj[u]:
                if cap[a] <= 0:
                    continue
                v = head[a]
                nd = d + max(cost[a] + potential[u] - potential[v], 0.0)
                if nd < dist[v] - _EPS:
                    dist[v] = nd
                    via[v] = a
                    heapq.heappush(heap, (nd, v))
        if dist[t] == inf:
            break
        for v in range(n):
            if dist[v] < inf:
                potential[v] += dist[v]
        push = inf
        v = t
        while v != s:
            a = via[v]
            push = min(push, cap[a])
            v = head[a ^ 1]
        v = t
        while v != s:
            a = via[v]
            cap[a] -= push
            cap[a ^ 1] += push
            v = head[a ^ 1]
        total_flow += push

    edge_flow = {}
    total_cost = 0.0
    for e in range(m):
        f = cap[2 * e + 1]
        if f:
            edge_flow[e] = f
            total_cost += f * graph.costs[e]
    return FlowResult(total_flow, total_cost, edge_flow)


# -- chunked selection ---------------------------------------------------------


class _GuardBudget(Exception):
    pass


class _Layered:
    """Layer bookkeeping extracted (and validated) from a FlowGraph."""

    def __init__(self, graph: FlowGraph, agent_nodes, set_nodes, chunk):
        self.graph = graph
        agent_nodes = list(agent_nodes)
        set_nodes = list(set_nodes)
        agents, sets = set(agent_nodes), set(set_nodes)
        if len(agents) != len(agent_nodes) or len(sets) != len(set_nodes):
            raise GraphShapeError("duplicate agent or set node ids")
        if agents & sets or {graph.source, graph.sink} & (agents | sets):
            raise GraphShapeError("agent, set, source and sink layers must be disjoint")
        self.agent_nodes = agent_nodes
        self.q = {}
        self.source_edge = {}
        self.agent_edges = {a: [] for a in agent_nodes}
        self.members = {s: [] for s in set_nodes}  # set node -> [(edge, task node)]
        self.sink_edge = {}
        task_nodes = set()
        for e, (u, v, c, _w) in enumerate(graph.edges()):
            if u == graph.source:
                if v not in agents or v in self.source_edge:
                    raise GraphShapeError(f"source edge {e} must reach a distinct agent node")
                self.source_edge[v] = e
                self.q[v] = c
            elif u in agents:
                if v not in sets:
                    raise GraphShapeError(f"agent edge {e} must reach a task-set node")
                self.agent_edges[u].append(e)
            elif u in sets:
                if v in agents or v in sets or v in (graph.source, graph.sink):
                    raise GraphShapeError(f"set edge {e} must reach a task node")
                self.members[u].append((e, v))
                task_nodes.add(v)
            elif v == graph.sink:
                if u in self.sink_edge:
                    raise GraphShapeError(f"task node {u} has two sink edges")
                self.sink_edge[u] = e
            else:
                raise GraphShapeError(f"edge {e} ({u}->{v}) does not fit the layered shape")
        missing = agents - set(self.source_edge)
        if missing:
            raise GraphShapeError(f"agent nodes without a source edge: {sorted(missing)}")
        if task_nodes - set(self.sink_edge):
            raise GraphShapeError("every task node needs exactly one sink edge")
        if chunk is not None and any(qv != chunk for qv in self.q.values()):
            raise GraphShapeError(f"source capacities differ from chunk size {chunk}")
        for a in agent_nodes:
            for e in self.agent_edges[a]:
                size = len(self.members[graph.heads[e]])
                if size != self.q[a]:
                    raise GraphShapeError(
                        f"agent node {a} (q={self.q[a]}) links a set of size {size}"
                    )
        self.set_key = {
            s: tuple(sorted(t for _, t in mem)) for s, mem in self.members.items()
        }
        # candidate (cost, set key, edge) lists per agent, cheapest first
        self.candidates = {
            a: sorted(
                (graph.costs[e], self.set_key[graph.heads[e]], e) for e in self.agent_edges[a]
            )
            for a in agent_nodes
        }


def _fits(layout, residual, set_node):
    return all(residual[t] >= 1 for _, t in layout.members[set_node])


def _best_completion(layout, agents, residual, goal, budget):
    """Largest total q the given agents can still take, stopping early at ``goal``.

    Depth-first over agents in the given order with a sum-of-q bound. Raises
    _GuardBudget after ``budget`` nodes.
    """
    qs = [layout.q[a] for a in agents]
    suffix = [0] * (len(agents) + 1)
    for i in range(len(agents) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + qs[i]
    goal = min(goal, suffix[0])
    best = 0
    nodes = 0
    heads = layout.graph.heads

    def dfs(i, acc):
        nonlocal best, nodes
        if acc > best:
            best = acc
        if best >= goal or i == len(agents) or acc + suffix[i] <= best:
            return
        nodes += 1
        if nodes > budget:
            raise _GuardBudget
        seen_keys = set()
        for _cost, key, e in layout.candidates[agents[i]]:
            if key in seen_keys:
                continue
            s = heads[e]
            if not _fits(layout, residual, s):
                continue
            seen_keys.add(key)
            for _, t in layout.members[s]:
                residual[t] -= 1
            dfs(i + 1, acc + qs[i])
            for _, t in layout.members[s]:
                residual[t] += 1
            if best >= goal:
                return
        dfs(i + 1, acc)

    dfs(0, 0)
    return best


def chunked_min_cost_selection(
    graph: FlowGraph,
    chunk=None,
    agent_nodes=(),
    set_nodes=(),
    preserve_max_count: bool = True,
    guard_budget: int = 200_000,
) -> FlowResult:
    """Commit whole task sets to agents, cheapest feasible pair first.

    ``chunk`` pins every agent's q (source capacity); pass None for fleets
    with per-agent q. With ``preserve_max_count`` a pair is only committed
    when the remaining agents can still reach the largest achievable number
    of completed task units, so cost is minimised only among count-maximal
    completions. The guard is a bounded search; if it runs out of budget the
    selection continues as the plain cheapest-pair rule and the result says
    so in ``count_guard``.
    """
    layout = _Layered(graph, agent_nodes, set_nodes, chunk)
    heads = graph.heads
    residual = {t: graph.caps[e] for t, e in layout.sink_edge.items()}
    order = {a: i for i, a in enumerate(layout.agent_nodes)}

    guard = "off"
    target = None
    if preserve_max_count and layout.agent_nodes:
        try:
            target = _best_completion(
                layout, layout.agent_nodes, residual, math.inf, guard_budget
            )
            guard = "on"
        except _GuardBudget:
            guard = "budget-exceeded"

    pointer = {a: 0 for a in layout.agent_nodes}
    heap = []

    def push_next(a):
        cands = layout.candidates[a]
        i = pointer[a]
        while i < len(cands) and not _fits(layout, residual, heads[cands[i][2]]):
            i += 1
        pointer[a] = i
        if i < len(cands):
            cost, key, e = cands[i]
            heapq.heappush(heap, (cost, order[a], key, e, a))

    for a in layout.agent_nodes:
        push_next(a)

    committed = 0
    unassigned = set(layout.agent_nodes)
    edge_flow = {}
    total_cost = 0.0
    selections = []
    while heap:
        cost, _, _key, e, a = heapq.heappop(heap)
        s = heads[e]
        if not _fits(layout, residual, s):
            pointer[a] += 1
            push_next(a)
            continue
        if guard == "on":
            for _, t in layout.members[s]:
                residual[t] -= 1
            rest = [b for b in layout.agent_nodes if b in unassigned and b != a]
            need = target - committed - layout.q[a]
            try:
                ok = need <= 0 or _best_completion(layout, rest, residual, need, guard_budget) >= need
            except _GuardBudget:
                ok = True
                guard = "budget-exceeded"
            for _, t in layout.members[s]:
                residual[t] += 1
            if not ok:
                pointer[a] += 1
                push_next(a)
                continue
        qa = layout.q[a]
        for me, t in layout.members[s]:
            residual[t] -= 1
            edge_flow[me] = edge_flow.get(me, 0) + 1
            se = layout.sink_edge[t]
            edge_flow[se] = edge_flow.get(se, 0) + 1
        edge_flow[layout.source_edge[a]] = qa
        edge_flow[e] = qa
        total_cost += cost
        committed += qa
        unassigned.discard(a)
        selections.append((a, s))

    return FlowResult(committed, total_cost, edge_flow, selections, guard)
