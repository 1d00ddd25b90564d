"""
Discrete-time UAV recharging rendezvous.

UAVs that need charging fly straight at their UGV; a UAV docks once its
planar distance to the UGV is at most the charging distance. Under PCTP the
UGV also drives: its heading is the normalized sum of the vectors to every
returning UAV and its speed is sum_i k * d_i / (v_i * E_i), clamped to the
ground-speed limit. The static baseline keeps the UGV parked.

All geometry is planar; altitude is ignored.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from .model import SCHEMA_VERSION, Position, _check_schema, position_from_dict, position_to_dict

ZERO = (0.0, 0.0)
_NORM_EPS = 1e-9
_DOCK_EPS = 1e-9

WORKING, RETURNING, CHARGED, EXHAUSTED = "working", "returning", "charged", "exhausted"


@dataclass(frozen=True)
class Uav:
    id: str
    position: Position
    speed: float = 20.0
    energy: float = 1.0
    rate: float = 2e-4  # energy per meter flown
    drain: float = 0.0  # energy per minute while still working

    def __post_init__(self):
        if not (self.speed > 0 and self.energy > 0 and self.rate >= 0 and self.drain >= 0):
            raise ValueError(f"uav {self.id}: speed and energy must be > 0, rates >= 0")


@dataclass(frozen=True)
class ChargingScenario:
    ugv: Position
    uavs: tuple
    ugv_max_speed: float = 5.0
    k: float = 1.0
    charge_distance: float = 1.0
    reserve_factor: float = None  # None: every UAV heads for the UGV at t = 0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "uavs", tuple(self.uavs))
        if self.ugv.h != 0:
            raise ValueError("the UGV must sit on the ground plane (h = 0)")
        if not (self.charge_distance > 0 and self.ugv_max_speed > 0 and self.k > 0):
            raise ValueError("charge distance, UGV speed limit and k must be > 0")
        if self.reserve_factor is not None and self.reserve_factor < 0:
            raise ValueError("reserve factor must be >= 0")


@dataclass
class SimResult:
    algorithm: str
    distances: dict  # entity id -> meters; the UGV is "ugv"
    total_distance: float
    time_to_last_charge: float
    charge_times: dict  # uav id -> minutes, None if never charged
    exhausted: list
    complete: bool
    steps: int
    energy_used: dict = field(default_factory=dict)
    trajectory: list = field(default_factory=list)  # (t, entity, x, y, energy, state)


def _planar(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def ugv_direction(ugv, uavs):
    """Unit heading toward the summed UAV offsets, or ZERO when they cancel."""
    ux, uy = _xy(ugv)
    sx = sy = 0.0
    for p in uavs:
        px, py = _xy(p)
        sx += px - ux
        sy += py - uy
    norm = math.hypot(sx, sy)
    if norm < _NORM_EPS:
        return ZERO
    return (sx / norm, sy / norm)


def ugv_speed(ugv, uavs, k=1.0, max_speed=5.0):
    """Sum of k * d_i / (v_i * E_i) over (position, speed, energy) triples, clamped."""
    here = _xy(ugv)
    total = 0.0
    for pos, v, energy in uavs:
        if energy <= 0:
            return max_speed
        total += k * _planar(_xy(pos), here) / (v * energy)
    return min(total, max_speed)


def _xy(p):
    if isinstance(p, Position):
        return (p.x, p.y)
    return (float(p[0]), float(p[1]))


def _simulate(scenario, dt, horizon, mobile, log):
    if not dt > 0:
        raise ValueError(f"time step must be > 0, got {dt}")
    if not math.isfinite(horizon) or horizon < 0:
        raise ValueError(f"horizon must be finite and >= 0, got {horizon}")
    D = scenario.charge_distance
    ugv = list(_xy(scenario.ugv))
    pos = {u.id: list(_xy(u.position)) for u in scenario.uavs}
    energy = {u.id: u.energy for u in scenario.uavs}
    travelled = {"ugv": 0.0, **{u.id: 0.0 for u in scenario.uavs}}
    charge_times = {u.id: None for u in scenario.uavs}
    rho = scenario.reserve_factor
    state = {}
    for u in scenario.uavs:
        d = _planar(pos[u.id], ugv)
        needs = rho is None or energy[u.id] <= (1 + rho) * u.rate * d
        if needs and d <= D + _DOCK_EPS:
            state[u.id] = CHARGED
            charge_times[u.id] = 0.0
        else:
            state[u.id] = RETURNING if needs else WORKING

    trajectory = []

    def record(t):
        if not log:
            return
        trajectory.append((t, "ugv", ugv[0], ugv[1], math.nan, "mobile" if mobile else "static"))
        for u in scenario.uavs:
            trajectory.append((t, u.id, pos[u.id][0], pos[u.id][1], energy[u.id], state[u.id]))

    record(0.0)
    step = 0
    max_steps = int(math.floor(horizon / dt + 1e-9))
    pending = lambda: any(s in (WORKING, RETURNING) for s in state.values())  # noqa: E731
    while pending() and step < max_steps and not any(s == EXHAUSTED for s in state.values()):
        t_next = (step + 1) * dt
        for u in scenario.uavs:
            if state[u.id] == WORKING:
                if energy[u.id] <= (1 + rho) * u.rate * _planar(pos[u.id], ugv):
                    state[u.id] = RETURNING
        returning = [u for u in scenario.uavs if state[u.id] == RETURNING]

        if mobile and returning:
            heading = ugv_direction(ugv, [pos[u.id] for u in returning])
            if heading != ZERO:
                speed = ugv_speed(
                    ugv, [(pos[u.id], u.speed, energy[u.id]) for u in returning],
                    scenario.k, scenario.ugv_max_speed,
                )
                # never close past the dock radius of the nearest returning UAV
                room = min(_planar(pos[u.id], ugv) for u in returning) - D
                step_len = min(speed * dt, max(room, 0.0))
                ugv[0] += heading[0] * step_len
                ugv[1] += heading[1] * step_len
                travelled["ugv"] += step_len

        for u in scenario.uavs:
            if state[u.id] == WORKING:
                energy[u.id] -= u.drain * dt
                if energy[u.id] <= 0:
                    energy[u.id] = 0.0
                    state[u.id] = EXHAUSTED
                continue
            if state[u.id] != RETURNING:
                continue
            p = pos[u.id]
            d = _planar(p, ugv)
            move = min(u.speed * dt, max(d - D, 0.0))
            if u.rate > 0 and u.rate * move > energy[u.id]:
                move = energy[u.id] / u.rate
                exhausted = True
            else:
                exhausted = False
            if d > 0 and move > 0:
                p[0] += (ugv[0] - p[0]) * move / d
                p[1] += (ugv[1] - p[1]) * move / d
            travelled[u.id] += move
            energy[u.id] -= u.rate * move
            if _planar(p, ugv) <= D + _DOCK_EPS:
                state[u.id] = CHARGED
                charge_times[u.id] = t_next
            elif exhausted:
                energy[u.id] = 0.0
                state[u.id] = EXHAUSTED
        step += 1
        record(t_next)

    done = [t for t in charge_times.values() if t is not None]
    return SimResult(
        algorithm="pctp" if mobile else "static",
        distances=travelled,
        total_distance=float(sum(travelled.values())),
        time_to_last_charge=max(done) if done else math.nan,
        charge_times=charge_times,
        exhausted=[uid for uid, s in state.items() if s == EXHAUSTED],
        complete=all(s == CHARGED for s in state.values()),
        steps=step,
        energy_used={u.id: u.energy - energy[u.id] for u in scenario.uavs},
        trajectory=trajectory,
    )


def run_pctp(scenario: ChargingScenario, dt: float = 0.1, horizon: float = 600.0, log: bool = False):
    return _simulate(scenario, dt, horizon, mobile=True, log=log)


def run_static(scenario: ChargingScenario, dt: float = 0.1, horizon: float = 600.0, log: bool = False):
    return _simulate(scenario, dt, horizon, mobile=False, log=log)


# -- I/O -----------------------------------------------------------------------

TRAJECTORY_COLUMNS = ("t", "entity", "x", "y", "energy", "state")


def write_trajectory_csv(result: SimResult, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        w.writerows(result.trajectory)


def sim_summary(result: SimResult) -> dict:
    nan_to_none = lambda v: None if isinstance(v, float) and math.isnan(v) else v  # noqa: E731
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "charging_result",
        "algorithm": result.algorithm,
        "total_distance": result.total_distance,
        "distances": result.distances,
        "time_to_last_charge": nan_to_none(result.time_to_last_charge),
        "charge_times": result.charge_times,
        "exhausted": result.exhausted,
        "complete": result.complete,
        "steps": result.steps,
    }


def charging_to_dict(s: ChargingScenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "charging",
        "name": s.name,
        "ugv": position_to_dict(s.ugv),
        "ugv_max_speed": s.ugv_max_speed,
        "k": s.k,
        "charge_distance": s.charge_distance,
        "reserve_factor": s.reserve_factor,
        "uavs": [
            {"id": u.id, "position": position_to_dict(u.position), "speed": u.speed,
             "energy": u.energy, "rate": u.rate, "drain": u.drain}
            for u in s.uavs
        ],
    }


def charging_from_dict(d) -> ChargingScenario:
    _check_schema(d, "charging")
    return ChargingScenario(
        ugv=position_from_dict(d["ugv"]),
        uavs=[
            Uav(str(u["id"]), position_from_dict(u["position"]), float(u["speed"]),
                float(u["energy"]), float(u["rate"]), float(u.get("drain", 0.0)))
            for u in d["uavs"]
        ],
        ugv_max_speed=float(d.get("ugv_max_speed", 5.0)),
        k=float(d.get("k", 1.0)),
        charge_distance=float(d["charge_distance"]),
        reserve_factor=d.get("reserve_factor"),
        name=d.get("name", ""),
    )
