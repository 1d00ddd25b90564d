"""
Flows and tours, the two building blocks
========================================

Everything in the few-agents allocator rests on two exact solvers: a
min-cost max-flow over small integer networks and a Held-Karp shortest
open path. This script exercises both on toy inputs you can check by hand.
"""

import numpy as np

from agco.flow import FlowGraph, check_conservation, min_cost_max_flow
from agco.model import Position
from agco.tour import heuristic_open_path, shortest_open_path

# A diamond: two routes from s to t, one cheap and narrow, one wide but dear.
#   s=0 -> a=1 (cap 2, cost 1) -> t=3 (cap 1, cost 1)
#   s=0 -> b=2 (cap 1, cost 3) -> t=3 (cap 2, cost 1)
g = FlowGraph(4, source=0, sink=3)
for u, v, cap, cost in [(0, 1, 2, 1.0), (1, 3, 1, 1.0), (0, 2, 1, 3.0), (2, 3, 2, 1.0)]:
    g.add_edge(u, v, cap, cost)
g.labels.update({0: "s", 1: "a", 2: "b", 3: "t"})

res = min_cost_max_flow(g)
check_conservation(g, res)
print(f"max flow {res.total_flow} at cost {res.total_cost}")  # 2 units, 2 + 4 = 6
print(g.to_dot(res.edge_flow))

# Held-Karp picks the best visiting order from a fixed start and does not
# return home. Stops on a line come back sorted.
start = Position(0, 0, 0)
stops = [Position(x, 0, 0) for x in (5, 1, 4, 2, 3)]
tour = shortest_open_path(start, stops)
print("order", tour.order, "length", tour.length, "exact", tour.exact)

# Above 15 stops the exact DP is skipped in favour of nearest neighbour plus
# 2-opt and relocate moves. On small sets we can see how close it gets.
rng = np.random.default_rng(1)
ratios = []
for _ in range(100):
    pts = rng.uniform(0, 100, (7, 3))
    s = rng.uniform(0, 100, 3)
    ratios.append(heuristic_open_path(s, pts).length / shortest_open_path(s, pts).length)
print(f"heuristic / exact over 100 seven-stop sets: mean {np.mean(ratios):.4f}, worst {max(ratios):.4f}")
