"""
Shortest open visiting paths.

An agent starts at its own position, visits every stop once and does not
return. ``shortest_open_path`` is exact (Held-Karp over subsets) up to
``EXACT_LIMIT`` stops and falls back to ``heuristic_open_path``
(nearest neighbour followed by 2-opt / relocate) above that.
``open_path_lengths`` evaluates the exact length for many equal-size stop
subsets at once and is what the allocator uses to price task sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EXACT_LIMIT = 15
_TIE = 1e-9


@dataclass(frozen=True)
class Tour:
    order: tuple
    length: float
    exact: bool = True


def _coords(points):
    if isinstance(points, np.ndarray):
        return np.asarray(points, dtype=float).reshape(-1, 3)
    return np.array([(p.x, p.y, p.h) for p in points], dtype=float).reshape(-1, 3)


def _point(p):
    if isinstance(p, np.ndarray):
        return np.asarray(p, dtype=float)
    return np.array([p.x, p.y, p.h], dtype=float)


def path_length(start, stops, order) -> float:
    """Length of start -> stops[order[0]] -> stops[order[1]] -> ..."""
    pts = _coords(stops)
    s = _point(start)
    total = 0.0
    prev = s
    for i in order:
        total += float(np.sqrt(((pts[i] - prev) ** 2).sum()))
        prev = pts[i]
    return total


def star_length(start, stops) -> float:
    """Sum of independent start-to-stop distances (no chaining)."""
    pts = _coords(stops)
    if len(pts) == 0:
        return 0.0
    return float(np.sqrt(((pts - _point(start)) ** 2).sum(axis=1)).sum())


def _layers(n):
    masks = np.arange(1 << n)
    pop = np.array([bin(m).count("1") for m in masks])
    return [masks[pop == s] for s in range(n + 1)]


def _suffix_table(dmat):
    """f[mask, ..., j]: shortest path that starts at stop j and covers ``mask``.

    ``dmat`` has shape (..., n, n); leading axes are batched.
    """
    n = dmat.shape[-1]
    batch = dmat.shape[:-2]
    f = np.full((1 << n,) + batch + (n,), np.inf)
    f[0] = 0.0
    for layer in _layers(n)[1:]:
        for k in range(n):
            bit = 1 << k
            masks = layer[(layer & bit) != 0]
            if len(masks) == 0:
                continue
            # d[j, k] + f[mask without k, k]
            cand = dmat[..., :, k][None] + f[masks ^ bit][..., k][..., None]
            f[masks] = np.minimum(f[masks], cand)
    return f


def _pairwise(pts):
    diff = pts[..., :, None, :] - pts[..., None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def open_path_lengths(start, coords, combos, block: int = 4096) -> np.ndarray:
    """Exact open-path length from ``start`` through each row of ``combos``.

    ``coords`` is an (N, 3) array of stop coordinates and ``combos`` a (K, q)
    integer array of stop indices; returns a length-K array.
    """
    coords = np.asarray(coords, dtype=float)
    combos = np.asarray(combos, dtype=int)
    start = _point(start)
    K = len(combos)
    if K == 0:
        return np.zeros(0)
    q = combos.shape[1]
    if q == 0:
        return np.zeros(K)
    out = np.empty(K)
    full = (1 << q) - 1
    for lo in range(0, K, block):
        pts = coords[combos[lo : lo + block]]  # (B, q, 3)
        ds = np.sqrt(((pts - start) ** 2).sum(axis=-1))  # (B, q)
        f = _suffix_table(_pairwise(pts))  # (2^q, B, q)
        best = np.full(len(pts), np.inf)
        for j in range(q):
            best = np.minimum(best, ds[:, j] + f[full ^ (1 << j), :, j])
        out[lo : lo + block] = best
    return out


def _held_karp(start, pts):
    n = len(pts)
    ds = np.sqrt(((pts - start) ** 2).sum(axis=-1))
    d = _pairwise(pts)
    f = _suffix_table(d)
    full = (1 << n) - 1
    totals = ds + np.array([f[full ^ (1 << j), j] for j in range(n)])
    best = totals.min()
    scale = max(1.0, best)
    # smallest index among (near-)optimal choices at each step
    j = int(np.flatnonzero(totals <= best + _TIE * scale)[0])
    order = [j]
    remaining = full ^ (1 << j)
    while remaining:
        rest = f[remaining, j]
        ks = [k for k in range(n) if remaining >> k & 1]
        vals = np.array([d[j, k] + f[remaining ^ (1 << k), k] for k in ks])
        k = ks[int(np.flatnonzero(vals <= rest + _TIE * scale)[0])]
        order.append(k)
        remaining ^= 1 << k
        j = k
    return tuple(order)


def shortest_open_path(start, stops, exact_limit: int = EXACT_LIMIT) -> Tour:
    pts = _coords(stops)
    n = len(pts)
    if n == 0:
        return Tour((), 0.0, True)
    if n > exact_limit:
        h = heuristic_open_path(start, stops)
        return Tour(h.order, h.length, False)
    order = _held_karp(_point(start), pts)
    return Tour(order, path_length(start, pts, order), True)


def visiting_tour(start, stops, semantics: str = "path") -> Tour:
    """Tour under either distance reading: chained ``path`` or independent ``star`` legs."""
    if semantics == "path":
        return shortest_open_path(start, stops)
    if semantics == "star":
        pts = _coords(stops)
        dist = np.sqrt(((pts - _point(start)) ** 2).sum(axis=-1))
        order = tuple(int(i) for i in np.argsort(dist, kind="stable"))
        return Tour(order, star_length(start, pts), True)
    raise ValueError(f"unknown distance semantics {semantics!r}")


def heuristic_open_path(start, stops) -> Tour:
    pts = _coords(stops)
    n = len(pts)
    if n == 0:
        return Tour((), 0.0, False)
    s = _point(start)
    all_pts = np.vstack([s[None], pts])  # node 0 is the start
    d = _pairwise(all_pts)

    # nearest neighbour, ties to the lowest index
    route = [0]
    left = set(range(1, n + 1))
    while left:
        cur = route[-1]
        nxt = min(left, key=lambda k: (d[cur, k], k))
        route.append(nxt)
        left.remove(nxt)

    def length(r):
        return float(sum(d[r[i], r[i + 1]] for i in range(len(r) - 1)))

    cur_len = length(route)
    improved = True
    while improved:
        improved = False
        # 2-opt: reverse route[i..j]
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                before = d[route[i - 1], route[i]]
                after = d[route[i - 1], route[j]]
                if j < n:
                    before += d[route[j], route[j + 1]]
                    after += d[route[i], route[j + 1]]
                if after < before - 1e-12:
                    route[i : j + 1] = route[i : j + 1][::-1]
                    cur_len = length(route)
                    improved = True
        # relocate a single stop
        for i in range(1, n + 1):
            node = route[i]
            base = route[:i] + route[i + 1 :]
            for j in range(1, n + 1):
                if j == i:
                    continue
                cand = base[:j] + [node] + base[j:]
                cl = length(cand)
                if cl < cur_len - 1e-12:
                    route, cur_len = cand, cl
                    improved = True
                    break
    order = tuple(k - 1 for k in route[1:])
    return Tour(order, path_length(start, pts, order), False)
