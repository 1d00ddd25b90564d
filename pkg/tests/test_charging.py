import csv
import json
import math

import numpy as np
import pytest

from agco.charging import (
    ZERO,
    ChargingScenario,
    Uav,
    charging_from_dict,
    charging_to_dict,
    run_pctp,
    run_static,
    sim_summary,
    ugv_direction,
    ugv_speed,
    write_trajectory_csv,
)
from agco.model import Position
from agco.scenario import gen_charging

O = Position(0, 0, 0)


def uav(i, x, y, **kw):
    return Uav(f"u{i}", Position(x, y, 10), **kw)


def test_direction_examples():
    assert ugv_direction(O, [(3, 4)]) == pytest.approx((0.6, 0.8))
    assert ugv_direction(O, [(1, 0), (-1, 0)]) == ZERO
    s = 1 / math.sqrt(2)
    assert ugv_direction(O, [(2, 0), (0, 2)]) == pytest.approx((s, s))


def test_speed_examples():
    assert ugv_speed(O, [((5, 0), 1, 1)], 1, 10) == pytest.approx(5)
    assert ugv_speed(O, [((5, 0), 1, 5)], 1, 10) == pytest.approx(1)
    assert ugv_speed(O, [((100, 0), 1, 0.1)], 1, 5) == 5


def test_head_on_meeting():
    s = ChargingScenario(O, [uav(0, 10, 0, speed=20)], ugv_max_speed=5, charge_distance=1)
    dt = 0.01
    r = run_pctp(s, dt=dt)
    assert r.complete and r.charge_times["u0"] < 10 / 20
    assert r.distances["ugv"] > 0
    assert r.distances["u0"] + r.distances["ugv"] == pytest.approx(9.0, abs=25 * dt)


def test_all_within_range():
    s = ChargingScenario(O, [uav(0, 0.5, 0), uav(1, 0, -0.8)], charge_distance=1)
    for run in (run_pctp, run_static):
        r = run(s)
        assert r.complete and r.total_distance == 0.0 and r.steps == 0
        assert r.charge_times == {"u0": 0.0, "u1": 0.0}


def test_symmetric_pair_keeps_ugv_still():
    s = ChargingScenario(O, [uav(0, 30, 0), uav(1, -30, 0)], charge_distance=1)
    dt = 0.1
    r = run_pctp(s, dt=dt)
    assert r.complete and r.distances["ugv"] == 0.0
    for uid in ("u0", "u1"):
        assert abs(r.distances[uid] - 29.0) <= 20 * dt


def test_static_straight_line():
    s = ChargingScenario(O, [uav(0, 10, 0)], charge_distance=1)
    r = run_static(s)
    assert r.distances == {"ugv": 0.0, "u0": pytest.approx(9.0)}
    for sc in gen_charging(3, 4):
        res = run_static(sc)
        for u in sc.uavs:
            d0 = math.hypot(u.position.x - sc.ugv.x, u.position.y - sc.ugv.y)
            expected = max(d0 - sc.charge_distance, 0.0)
            assert abs(res.distances[u.id] - expected) <= u.speed * 0.1 + 1e-9


def test_distance_strictly_decreasing_and_energy_bookkeeping():
    for sc in gen_charging(11, 3):
        r = run_pctp(sc, dt=0.1, log=True)
        assert r.complete
        by_t = {}
        for t, ent, x, y, e, state in r.trajectory:
            by_t.setdefault(t, {})[ent] = (x, y, e, state)
        times = sorted(by_t)
        for u in sc.uavs:
            gaps, energies = [], []
            for t in times:
                x, y, e, state = by_t[t][u.id]
                gx, gy = by_t[t]["ugv"][:2]
                if state != "charged":
                    gaps.append(math.hypot(x - gx, y - gy))
                energies.append(e)
            assert all(b < a for a, b in zip(gaps, gaps[1:]))
            assert all(b <= a for a, b in zip(energies, energies[1:]))
            assert r.energy_used[u.id] == pytest.approx(r.distances[u.id] * u.rate, rel=1e-12)
        assert r.total_distance == pytest.approx(sum(r.distances.values()))


def test_halving_dt_is_stable():
    for sc in gen_charging(2, 3):
        a, b = run_pctp(sc, dt=0.1), run_pctp(sc, dt=0.05)
        bound = 2 * sum(u.speed for u in sc.uavs) * 0.1
        assert abs(a.total_distance - b.total_distance) < bound


def test_deterministic():
    sc = gen_charging(5, 4)[0]
    assert run_pctp(sc) == run_pctp(sc)


def test_parameter_errors():
    s = ChargingScenario(O, [uav(0, 10, 0)])
    for dt in (0, -0.1):
        with pytest.raises(ValueError):
            run_pctp(s, dt=dt)
    with pytest.raises(ValueError):
        run_static(s, horizon=math.inf)
    with pytest.raises(ValueError):
        ChargingScenario(O, [uav(0, 10, 0)], charge_distance=0)
    with pytest.raises(ValueError):
        Uav("u", Position(0, 0, 0), energy=0)


def test_horizon_marks_incomplete():
    s = ChargingScenario(O, [uav(0, 1000, 0)])
    r = run_static(s, dt=0.1, horizon=1.0)
    assert not r.complete and r.steps == 10 and math.isnan(r.time_to_last_charge)


def test_energy_exhaustion_flagged():
    s = ChargingScenario(O, [uav(0, 1000, 0, energy=0.01, rate=1e-4)])
    r = run_static(s)
    assert r.exhausted == ["u0"] and not r.complete
    assert r.distances["u0"] == pytest.approx(100.0)


def test_reserve_trigger_delays_return():
    # 1 energy at rate 0.01/m and 20% reserve: returns once energy <= 1.2 * 0.01 * 50 = 0.6
    s = ChargingScenario(O, [uav(0, 50, 0, energy=1.0, rate=0.01, drain=0.1)], reserve_factor=0.2)
    r = run_static(s, dt=0.1, log=True)
    assert r.complete
    states = [(t, st) for t, ent, *_rest, st in r.trajectory if ent == "u0"]
    first_return = min(t for t, st in states if st == "returning")
    assert first_return == pytest.approx(4.0, abs=0.11)


def test_io(tmp_path):
    sc = gen_charging(1, 2)[0]
    r = run_pctp(sc, log=True)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(r, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "entity", "x", "y", "energy", "state"]
    assert len(rows) == 1 + (r.steps + 1) * (len(sc.uavs) + 1)
    doc = json.loads(json.dumps(sim_summary(r)))
    assert doc["total_distance"] == r.total_distance and doc["complete"]
    assert charging_from_dict(json.loads(json.dumps(charging_to_dict(sc)))) == sc


def test_single_uav_ties_static():
    # collinear closing: both policies cover exactly d0 - D in total
    for sc in gen_charging(7, 1):
        assert run_pctp(sc).total_distance == pytest.approx(run_static(sc).total_distance, abs=1e-9)


def test_pctp_beats_static_on_average():
    diffs = []
    for seed in range(10):
        for sc in gen_charging(seed, 3):
            diffs.append(run_static(sc).total_distance - run_pctp(sc).total_distance)
    assert np.mean(diffs) >= -1e-9


def test_ugv_does_not_overshoot_dock_radius():
    s = ChargingScenario(O, [uav(0, 1.2, 0, energy=0.001, rate=1e-6)], ugv_max_speed=5)
    r = run_pctp(s, dt=0.1)
    assert r.distances["ugv"] == pytest.approx(0.2) and r.distances["u0"] == 0.0


def test_layouts():
    centered = gen_charging(0, 3, layout="centered")
    for sc in centered:
        for u in sc.uavs:
            assert abs(u.position.x - sc.ugv.x) <= 150 and abs(u.position.y - sc.ugv.y) <= 150
    for sc in gen_charging(0, 3):
        for p in [sc.ugv] + [u.position for u in sc.uavs]:
            assert 0 <= p.x <= 1000 and 0 <= p.y <= 1000
    with pytest.raises(ValueError):
        gen_charging(0, 3, layout="ring")
