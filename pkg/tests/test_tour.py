import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agco.model import Position
from agco.tour import heuristic_open_path, open_path_lengths, path_length, shortest_open_path, visiting_tour
from oracles import tour_bruteforce

O = Position(0, 0, 0)


def test_single_stop():
    t = shortest_open_path(O, [Position(5, 0, 0)])
    assert t.order == (0,) and t.length == 5.0 and t.exact


def test_collinear_pair():
    t = shortest_open_path(O, [Position(2, 0, 0), Position(1, 0, 0)])
    assert t.order == (1, 0) and t.length == 2.0


def test_empty():
    assert shortest_open_path(O, []).length == 0.0
    assert heuristic_open_path(O, []).length == 0.0


def test_six_stops_match_all_permutations():
    rng = np.random.default_rng(5)
    for _ in range(20):
        pts = rng.uniform(0, 100, (6, 3))
        start = rng.uniform(0, 100, 3)
        best = min(path_length(start, pts, p) for p in itertools.permutations(range(6)))
        assert shortest_open_path(start, pts).length == pytest.approx(best, abs=1e-9)


def test_lexicographic_tie_break():
    # two mirror-image optimal orders; the smaller index sequence wins
    stops = [Position(1, 0, 0), Position(-1, 0, 0)]
    t = shortest_open_path(O, stops)
    assert t.order == (0, 1) and t.length == 3.0


def test_large_sets_route_to_heuristic():
    rng = np.random.default_rng(1)
    pts = rng.uniform(0, 100, (17, 3))
    t = shortest_open_path(rng.uniform(0, 100, 3), pts)
    assert not t.exact and sorted(t.order) == list(range(17))


def test_heuristic_sorts_collinear():
    xs = [5, 1, 4, 2, 3]
    t = heuristic_open_path(O, [Position(x, 0, 0) for x in xs])
    assert t.length == pytest.approx(5.0)
    assert [xs[i] for i in t.order] == [1, 2, 3, 4, 5]


def test_heuristic_ratio_small_sets():
    rng = np.random.default_rng(9)
    worst = 1.0
    for _ in range(200):
        n = int(rng.integers(1, 8))
        pts = rng.uniform(0, 100, (n, 3))
        start = rng.uniform(0, 100, 3)
        exact = shortest_open_path(start, pts).length
        h = heuristic_open_path(start, pts).length
        assert h >= exact - 1e-9
        if n <= 3:
            assert h == pytest.approx(exact, abs=1e-9)
        worst = max(worst, h / exact if exact else 1.0)
    print(f"worst heuristic/exact ratio over 200 instances: {worst:.4f}")
    assert worst <= 1.5


def test_batch_lengths_agree_with_scalar():
    rng = np.random.default_rng(2)
    coords = rng.uniform(0, 50, (8, 3))
    start = rng.uniform(0, 50, 3)
    combos = np.array(list(itertools.combinations(range(8), 4)))
    batch = open_path_lengths(start, coords, combos, block=7)
    for c, L in zip(combos, batch):
        assert L == pytest.approx(tour_bruteforce(tuple(start), [tuple(coords[i]) for i in c]), abs=1e-9)


def test_star_semantics():
    stops = [Position(3, 0, 0), Position(0, 4, 0)]
    t = visiting_tour(O, stops, "star")
    assert t.length == 7.0
    assert visiting_tour(O, stops, "path").length == pytest.approx(3 + 5)
    with pytest.raises(ValueError):
        visiting_tour(O, stops, "ring")


stops_strategy = st.lists(
    st.tuples(*[st.floats(-100, 100, allow_nan=False)] * 3), min_size=1, max_size=6
)


@settings(max_examples=60, deadline=None)
@given(stops_strategy, st.randoms(use_true_random=False), st.tuples(*[st.floats(-50, 50)] * 3))
def test_permutation_and_translation_invariance(stops, rnd, shift):
    start = np.zeros(3)
    pts = np.array(stops)
    base = shortest_open_path(start, pts).length
    perm = list(range(len(stops)))
    rnd.shuffle(perm)
    assert shortest_open_path(start, pts[perm]).length == pytest.approx(base, rel=1e-9, abs=1e-9)
    moved = shortest_open_path(start + shift, pts + np.array(shift)).length
    assert moved == pytest.approx(base, rel=1e-9, abs=1e-7)
    far = np.sqrt(((pts - start) ** 2).sum(axis=1)).max()
    assert base >= far - 1e-9
