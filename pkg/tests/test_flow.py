import itertools

import numpy as np
import pytest

from agco.errors import GraphError, GraphShapeError
from agco.flow import FlowGraph, check_conservation, chunked_min_cost_selection, min_cost_max_flow
from generators import flow_graph, random_flow_edges
from oracles import enumerate_flows


def test_single_edge():
    g = FlowGraph(2, 0, 1)
    g.add_edge(0, 1, 3, 2.0)
    r = min_cost_max_flow(g)
    assert (r.total_flow, r.total_cost) == (3, 6.0)


def test_parallel_edges():
    g = FlowGraph(2, 0, 1)
    g.add_edge(0, 1, 1, 1.0)
    g.add_edge(0, 1, 1, 5.0)
    r = min_cost_max_flow(g)
    assert (r.total_flow, r.total_cost) == (2, 6.0)


def test_diamond_matches_enumeration():
    # s=0, a=1, b=2, t=3
    edges = [(0, 1, 2, 1.0), (1, 3, 1, 1.0), (0, 2, 1, 3.0), (2, 3, 2, 1.0)]
    r = min_cost_max_flow(flow_graph(4, edges, 0, 3))
    assert (r.total_flow, r.total_cost) == enumerate_flows(4, edges, 0, 3)
    assert (r.total_flow, r.total_cost) == (2, 6.0)


def test_random_graphs_match_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(150):
        n, edges, s, t = random_flow_edges(rng)
        g = flow_graph(n, edges, s, t)
        r = min_cost_max_flow(g)
        check_conservation(g, r)
        flow, cost = enumerate_flows(n, edges, s, t)
        assert r.total_flow == flow
        assert r.total_cost == pytest.approx(cost, abs=1e-9)
        assert r.total_cost == pytest.approx(sum(f * g.costs[e] for e, f in r.edge_flow.items()))


def test_malformed_graphs():
    with pytest.raises(GraphError):
        FlowGraph(3, 0, 5)
    g = FlowGraph(3, 0, 2)
    with pytest.raises(GraphError):
        g.add_edge(0, 7, 1, 1.0)
    with pytest.raises(GraphError):
        g.add_edge(1, 1, 1, 1.0)
    with pytest.raises(GraphError):
        g.add_edge(0, 1, 1.5, 1.0)
    with pytest.raises(GraphError):
        g.add_edge(0, 1, 1, -2.0)


def test_dot_dump():
    g = FlowGraph(2, 0, 1)
    g.labels[0] = "source"
    g.add_edge(0, 1, 3, 2.0)
    dot = g.to_dot({0: 3})
    assert dot.startswith("digraph") and '"3/3 @ 2"' in dot and "source" in dot


def layered(agent_q, sets, costs, caps):
    """agent_q: [q]; sets: {name: [task]}; costs: {(agent index, set name): cost}; caps: {task: p}."""
    tasks = sorted(caps)
    names = sorted(sets)
    n_agents = len(agent_q)
    agent_nodes = list(range(2, 2 + n_agents))
    set_node = {s: 2 + n_agents + i for i, s in enumerate(names)}
    task_node = {t: 2 + n_agents + len(names) + i for i, t in enumerate(tasks)}
    g = FlowGraph(2 + n_agents + len(names) + len(tasks), 0, 1)
    for a, q in zip(agent_nodes, agent_q):
        g.add_edge(0, a, q)
    for (ai, s), w in sorted(costs.items()):
        g.add_edge(agent_nodes[ai], set_node[s], agent_q[ai], w)
    for s in names:
        for t in sets[s]:
            g.add_edge(set_node[s], task_node[t], caps[t])
    for t in tasks:
        g.add_edge(task_node[t], 1, caps[t])
    return g, agent_nodes, list(set_node.values()), set_node


def test_chunked_picks_cheapest_set():
    sets = {"AB": "AB", "AC": "AC", "BC": "BC"}
    g, an, sn, set_node = layered([2], sets, {(0, "AB"): 10, (0, "AC"): 7, (0, "BC"): 9},
                                  {"A": 1, "B": 1, "C": 1})
    r = chunked_min_cost_selection(g, 2, an, sn)
    assert (r.total_flow, r.total_cost) == (2, 7)
    assert r.selections == [(an[0], set_node["AC"])]
    check_conservation(g, r)


def test_chunked_empty():
    g = FlowGraph(2, 0, 1)
    r = chunked_min_cost_selection(g, 2, [], [])
    assert (r.total_flow, r.total_cost) == (0, 0)


def test_chunked_blocked_second_agent():
    sets = {"AB": "AB", "AC": "AC"}
    g, an, sn, set_node = layered([2, 2], sets, {(0, "AB"): 1.0, (1, "AC"): 2.0},
                                  {"A": 1, "B": 1, "C": 1})
    r = chunked_min_cost_selection(g, 2, an, sn)
    # exhaustive over joint selections: {none, AB} x {none, AC}, A can be used once
    joint = [(0, 0.0), (2, 1.0), (2, 2.0)]
    best = max(joint, key=lambda cw: (cw[0], -cw[1]))
    assert (r.total_flow, r.total_cost) == best
    assert r.selections == [(an[0], set_node["AB"])]
    check_conservation(g, r)


def test_guard_keeps_count_maximal():
    # agent 0 prefers AB, which would starve agent 1 (it can only use AB or... nothing else)
    sets = {"AB": "AB", "CD": "CD"}
    costs = {(0, "AB"): 1.0, (0, "CD"): 5.0, (1, "AB"): 3.0}
    caps = {t: 1 for t in "ABCD"}
    g, an, sn, set_node = layered([2, 2], sets, costs, caps)
    plain = chunked_min_cost_selection(g, 2, an, sn, preserve_max_count=False)
    assert plain.total_flow == 2
    guarded = chunked_min_cost_selection(g, 2, an, sn)
    assert guarded.total_flow == 4 and guarded.total_cost == 8.0
    assert guarded.count_guard == "on"


def test_chunked_invariants_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        tasks = "ABCDE"
        q = 2
        combos = ["".join(c) for c in itertools.combinations(tasks, q)]
        n_agents = int(rng.integers(1, 4))
        costs = {(a, s): float(rng.uniform(1, 20)) for a in range(n_agents) for s in combos
                 if rng.random() < 0.5}
        caps = {t: int(rng.integers(1, 3)) for t in tasks}
        g, an, sn, _ = layered([q] * n_agents, {s: s for s in combos}, costs, caps)
        r = chunked_min_cost_selection(g, q, an, sn)
        check_conservation(g, r)
        for a in an:
            out = sum(f for e, f in r.edge_flow.items() if g.tails[e] == a)
            assert out in (0, q)
        for e, f in r.edge_flow.items():
            if g.heads[e] == 1:
                assert f <= g.caps[e]


def test_shape_errors():
    g, an, sn, _ = layered([2], {"AB": "AB"}, {(0, "AB"): 1.0}, {"A": 1, "B": 1})
    with pytest.raises(GraphShapeError):
        chunked_min_cost_selection(g, 3, an, sn)
    with pytest.raises(GraphShapeError):
        chunked_min_cost_selection(g, 2, [], sn)
    bad = FlowGraph(3, 0, 1)
    bad.add_edge(0, 2, 1)
    bad.add_edge(2, 0, 1)
    with pytest.raises(GraphShapeError):
        chunked_min_cost_selection(bad, 1, [2], [])
    # agent q disagrees with the size of a set it links to
    g2, an2, sn2, _ = layered([3], {"AB": "AB"}, {(0, "AB"): 1.0}, {"A": 1, "B": 1})
    with pytest.raises(GraphShapeError):
        chunked_min_cost_selection(g2, None, an2, sn2)
