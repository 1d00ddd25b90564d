"""Best-first branch and bound for pure integer linear programs.

LP relaxations go to HiGHS' dual simplex (``scipy.optimize.linprog``); this
module owns the integer layer: node queue, branching rule, pruning and the
incumbent.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import InfeasibleError, NodeBudgetExceeded

INT_TOL = 1e-6
PRUNE_TOL = 1e-9


@dataclass
class IlpResult:
    x: np.ndarray
    objective: float
    root_bound: float
    nodes: int
    gap: float


def _relax(c, A_ub, b_ub, A_eq, b_eq, lo, hi):
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
        bounds=np.column_stack([lo, hi]), method="highs-ds",
    )
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"LP relaxation failed: {res.message}")
    return res.fun, res.x


def _feasible(x, A_ub, b_ub, A_eq, b_eq, tol=1e-6):
    if A_ub is not None and len(b_ub) and np.any(A_ub @ x > b_ub + tol):
        return False
    if A_eq is not None and len(b_eq) and np.any(np.abs(A_eq @ x - b_eq) > tol):
        return False
    return True


def solve_ilp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lower=None, upper=None,
              node_limit=1_000_000):
    """Minimise c @ x over integer x subject to A_ub x <= b_ub, A_eq x = b_eq, bounds.

    Nodes are explored best-bound first; branching is on the most fractional
    variable (lowest index on ties); a node is pruned once its relaxation
    bound is within 1e-9 of the incumbent. Raises InfeasibleError if no
    integer point exists and NodeBudgetExceeded when ``node_limit`` LPs have
    been solved without proving optimality.
    """
    c = np.asarray(c, dtype=float)
    n = len(c)
    lo = np.zeros(n) if lower is None else np.asarray(lower, dtype=float)
    hi = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float)

    incumbent_x, incumbent = None, math.inf
    counter = 0
    heap = [(-math.inf, counter, lo, hi)]
    nodes = 0
    root_bound = None
    while heap:
        parent_bound, _, nlo, nhi = heapq.heappop(heap)
        if parent_bound >= incumbent - PRUNE_TOL:
            continue
        if nodes >= node_limit:
            gap = _gap(incumbent, min([parent_bound] + [h[0] for h in heap]))
            raise NodeBudgetExceeded(nodes, incumbent_x, gap)
        nodes += 1
        relaxed = _relax(c, A_ub, b_ub, A_eq, b_eq, nlo, nhi)
        if relaxed is None:
            continue
        bound, x = relaxed
        if root_bound is None:
            root_bound = bound
        if bound >= incumbent - PRUNE_TOL:
            continue
        frac = np.abs(x - np.round(x))
        if np.all(frac <= INT_TOL):
            xi = np.round(x)
            if _feasible(xi, A_ub, b_ub, A_eq, b_eq):
                val = float(c @ xi)
                if val < incumbent:
                    incumbent, incumbent_x = val, xi
                continue
        # most fractional component (closest to .5), lowest index on ties
        part = x - np.floor(x)
        score = np.where(frac > INT_TOL, np.abs(part - 0.5), np.inf)
        k = int(np.argmin(score))
        if not np.isfinite(score[k]):
            # rounding drifted out of the polytope; split on the largest deviation
            k = int(np.argmax(frac))
        down_hi = nhi.copy()
        down_hi[k] = math.floor(x[k])
        up_lo = nlo.copy()
        up_lo[k] = math.ceil(x[k]) if down_hi[k] < x[k] else math.floor(x[k]) + 1
        counter += 1
        heapq.heappush(heap, (bound, counter, nlo, down_hi))
        counter += 1
        heapq.heappush(heap, (bound, counter, up_lo, nhi))

    if incumbent_x is None:
        raise InfeasibleError("integer program has no feasible solution")
    # bound sandwich: relaxation <= integer optimum
    assert root_bound <= incumbent + 1e-7 * max(1.0, abs(incumbent)), (root_bound, incumbent)
    return IlpResult(incumbent_x.astype(int), incumbent, root_bound, nodes, 0.0)


def _gap(incumbent, bound):
    if not math.isfinite(incumbent):
        return math.inf
    return (incumbent - bound) / max(1.0, abs(incumbent))
