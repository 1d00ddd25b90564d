"""
Seeded scenario generation and latitude/longitude ingestion.

Every generator draws from ``numpy.random.default_rng`` streams spawned from
a single seed, one stream per entity family, so that growing the task count
keeps the earlier tasks unchanged (task lists for N=10 are a prefix of those
for N=30 under the same seed).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .charging import ChargingScenario, Uav
from .maft import MaftInstance, Region
from .model import Agent, AgentKind, FamtScenario, Position, Task

EARTH_RADIUS_M = 6_371_000.0


class Distribution(str, Enum):
    COMPACT = "compact"
    SCATTERED = "scattered"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    distribution: Distribution = Distribution.HYBRID
    n_uav: int = 2
    n_ugv: int = 2
    n_tasks: int = 20
    area: tuple = (0.0, 0.0, 1000.0, 1000.0)  # x0, y0, x1, y1
    agent_region: tuple = (300.0, 300.0, 700.0, 700.0)
    uav_speed: float = 20.0
    ugv_speed: float = 5.0
    uav_altitude: float = 10.0
    q: int = 3  # None draws each agent's q uniformly from q_range
    q_range: tuple = (2, 7)
    p: int = 6
    max_travel: float = 10_000.0
    capability_dims: int = 2
    agent_capability_range: tuple = (1.0, 5.0)
    task_requirement_range: tuple = (1.0, 3.0)
    # more-agents-few-tasks setup
    maft_region_range: tuple = (3, 5)
    maft_agent_range: tuple = (5, 20)
    maft_tasks: int = 20
    maft_demand: int = 5
    region_jitter: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        ax0, ay0, ax1, ay1 = self.area
        rx0, ry0, rx1, ry1 = self.agent_region
        if not (ax0 < ax1 and ay0 < ay1 and rx0 < rx1 and ry0 < ry1):
            raise ValueError("area and agent region must have positive extent")
        if not (ax0 <= rx0 and ay0 <= ry0 and rx1 <= ax1 and ry1 <= ay1):
            raise ValueError("agent region must lie inside the area")
        if min(self.n_uav, self.n_ugv, self.n_tasks, self.maft_tasks) < 0:
            raise ValueError("counts must be >= 0")
        if self.p < 1 or self.maft_demand < 1:
            raise ValueError("p must be >= 1")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be >= 1")
        if self.uav_altitude < 0:
            raise ValueError("UAV altitude must be >= 0")

    @property
    def n_agents(self):
        return self.n_uav + self.n_ugv

    def with_(self, **changes):
        return replace(self, **changes)


def _streams(seed):
    agents, tasks, maft, charging = np.random.SeedSequence(int(seed)).spawn(4)
    return {
        "agents": np.random.default_rng(agents),
        "tasks": np.random.default_rng(tasks),
        "maft": np.random.default_rng(maft),
        "charging": np.random.default_rng(charging),
    }


def _inside(x, y, box):
    return box[0] <= x <= box[2] and box[1] <= y <= box[3]


def _task_point(rng, cfg):
    dist = cfg.distribution
    if dist is Distribution.COMPACT:
        box = cfg.agent_region
        return rng.uniform(box[0], box[2]), rng.uniform(box[1], box[3])
    box = cfg.area
    for _ in range(100_000):
        x, y = rng.uniform(box[0], box[2]), rng.uniform(box[1], box[3])
        if dist is Distribution.HYBRID or not _inside(x, y, cfg.agent_region):
            return x, y
    raise ValueError("scattered distribution has (almost) no support outside the agent region")


def gen_famt(cfg: GenConfig) -> FamtScenario:
    if cfg.distribution is Distribution.SCATTERED and tuple(cfg.area) == tuple(cfg.agent_region):
        raise ValueError("scattered tasks need an area larger than the agent region")
    rng = _streams(cfg.seed)
    ra, rt = rng["agents"], rng["tasks"]
    lo_c, hi_c = cfg.agent_capability_range
    lo_r, hi_r = cfg.task_requirement_range
    box = cfg.agent_region
    agents = []
    kinds = [AgentKind.UAV] * cfg.n_uav + [AgentKind.UGV] * cfg.n_ugv
    for i, kind in enumerate(kinds):
        x, y = ra.uniform(box[0], box[2]), ra.uniform(box[1], box[3])
        caps = tuple(ra.uniform(lo_c, hi_c, cfg.capability_dims).tolist())
        drawn_q = int(ra.integers(cfg.q_range[0], cfg.q_range[1] + 1))
        uav = kind is AgentKind.UAV
        agents.append(Agent(
            id=f"a{i}",
            kind=kind,
            position=Position(x, y, cfg.uav_altitude if uav else 0.0),
            speed=cfg.uav_speed if uav else cfg.ugv_speed,
            capabilities=caps,
            max_travel=cfg.max_travel,
            task_limit=cfg.q if cfg.q is not None else drawn_q,
        ))
    tasks = []
    for j in range(cfg.n_tasks):
        x, y = _task_point(rt, cfg)
        req = tuple(rt.uniform(lo_r, hi_r, cfg.capability_dims).tolist())
        tasks.append(Task(f"t{j}", Position(x, y, 0.0), req, cfg.p))
    meta = {"seed": cfg.seed, "distribution": cfg.distribution.value}
    return FamtScenario(agents, tasks, name=f"famt-{cfg.distribution.value}-s{cfg.seed}", meta=meta)


def region_centers(n, area, jitter, rng):
    """Centers of the first n cells of a near-square grid over the area, jittered."""
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    x0, y0, x1, y1 = area
    w, h = (x1 - x0) / cols, (y1 - y0) / rows
    out = []
    for c in range(n):
        r, col = divmod(c, cols)
        cx = x0 + (col + 0.5) * w + rng.uniform(-jitter, jitter) * w
        cy = y0 + (r + 0.5) * h + rng.uniform(-jitter, jitter) * h
        out.append((cx, cy))
    return out


def gen_maft(cfg: GenConfig) -> MaftInstance:
    rng = _streams(cfg.seed)["maft"]
    lo_n, hi_n = cfg.maft_region_range
    n_regions = int(rng.integers(lo_n, hi_n + 1))
    lo_c, hi_c = cfg.agent_capability_range
    lo_r, hi_r = cfg.task_requirement_range
    regions = []
    for i, (cx, cy) in enumerate(region_centers(n_regions, cfg.area, cfg.region_jitter, rng)):
        count = int(rng.integers(cfg.maft_agent_range[0], cfg.maft_agent_range[1] + 1))
        n_uav = int(rng.integers(0, count + 1))
        regions.append(Region(
            id=f"r{i}",
            position=Position(cx, cy, 0.0),
            n_uav=n_uav,
            n_ugv=count - n_uav,
            uav_speed=cfg.uav_speed,
            ugv_speed=cfg.ugv_speed,
            uav_capabilities=tuple(rng.uniform(lo_c, hi_c, cfg.capability_dims).tolist()),
            ugv_capabilities=tuple(rng.uniform(lo_c, hi_c, cfg.capability_dims).tolist()),
        ))
    x0, y0, x1, y1 = cfg.area
    tasks = [
        Task(
            f"t{j}",
            Position(rng.uniform(x0, x1), rng.uniform(y0, y1), 0.0),
            tuple(rng.uniform(lo_r, hi_r, cfg.capability_dims).tolist()),
            cfg.maft_demand,
        )
        for j in range(cfg.maft_tasks)
    ]
    inst = MaftInstance(regions, tasks, name=f"maft-s{cfg.seed}", meta={"seed": cfg.seed})
    report = inst.feasibility_report()
    inst.meta["feasible"] = report is None
    if report:
        inst.meta["infeasible_reason"] = report
    return inst


def gen_charging(
    seed: int,
    uavs_per_ugv: int,
    n_regions: int = 4,
    area: tuple = (0.0, 0.0, 1000.0, 1000.0),
    spread: float = 150.0,
    charge_distance: float = 1.0,
    uav_speed: float = 20.0,
    ugv_max_speed: float = 5.0,
    k: float = 1.0,
    energy_range: tuple = (0.2, 1.0),
    rate: float = 2e-4,
    layout: str = "cell",
) -> list:
    """One charging scenario per region of a grid over ``area``.

    layout "cell": the UGV and its UAVs are all uniform inside the region's
    grid cell, like agents elsewhere in the generators.
    layout "centered": the UGV sits at the cell center with its UAVs uniform
    in a square of half-width ``spread`` around it.
    UAVs are never placed within the charging distance of the UGV.
    """
    if layout not in ("cell", "centered"):
        raise ValueError(f"unknown charging layout {layout!r}")
    rng = _streams(seed)["charging"]
    cols = math.ceil(math.sqrt(n_regions))
    rows = math.ceil(n_regions / cols)
    half_w = (area[2] - area[0]) / cols / 2
    half_h = (area[3] - area[1]) / rows / 2
    out = []
    for r, (cx, cy) in enumerate(region_centers(n_regions, area, 0.0, rng)):
        if layout == "cell":
            gx, gy = cx + rng.uniform(-half_w, half_w), cy + rng.uniform(-half_h, half_h)
            ox, oy, sx, sy = cx, cy, half_w, half_h
        else:
            gx, gy = cx, cy
            ox, oy, sx, sy = cx, cy, spread, spread
        uavs = []
        while len(uavs) < uavs_per_ugv:
            x, y = ox + rng.uniform(-sx, sx), oy + rng.uniform(-sy, sy)
            if math.hypot(x - gx, y - gy) <= charge_distance:
                continue
            uavs.append(Uav(
                id=f"r{r}u{len(uavs)}",
                position=Position(x, y, 0.0),
                speed=uav_speed,
                energy=float(rng.uniform(*energy_range)),
                rate=rate,
            ))
        out.append(ChargingScenario(
            ugv=Position(gx, gy, 0.0), uavs=uavs, ugv_max_speed=ugv_max_speed, k=k,
            charge_distance=charge_distance, name=f"charging-s{seed}-r{r}-n{uavs_per_ugv}",
        ))
    return out


# -- geo ingestion -------------------------------------------------------------


class GeoValidationError(ValueError):
    def __init__(self, row, message):
        self.row = row
        super().__init__(f"row {row}: {message}")


@dataclass(frozen=True)
class GeoRecord:
    lat: float
    lon: float
    timestamp: str = None
    site_id: str = None


def _validate(rec, row):
    for name, v, lim in (("latitude", rec.lat, 90.0), ("longitude", rec.lon, 180.0)):
        if not (isinstance(v, (int, float)) and math.isfinite(v)) or abs(v) > lim:
            raise GeoValidationError(row, f"{name} {v!r} outside [-{lim}, {lim}]")


def ingest_geo(records, reference: GeoRecord) -> list:
    """Equirectangular projection about ``reference``; returns ground-level Positions."""
    _validate(reference, 0)
    lat0 = math.radians(reference.lat)
    coslat = math.cos(lat0)
    out = []
    for row, rec in enumerate(records, start=1):
        _validate(rec, row)
        x = EARTH_RADIUS_M * math.radians(rec.lon - reference.lon) * coslat
        y = EARTH_RADIUS_M * math.radians(rec.lat - reference.lat)
        out.append(Position(x, y, 0.0))
    return out


def read_geo_csv(path) -> list:
    """Read ``lat,lon[,timestamp,site_id]`` rows (UTF-8, header required)."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header[:2] != ["lat", "lon"] or not set(header[2:]) <= {"timestamp", "site_id"}:
            raise GeoValidationError(0, f"expected header lat,lon[,timestamp,site_id], got {header}")
        for row, fields in enumerate(reader, start=1):
            if not fields:
                continue
            values = dict(zip(header, (f.strip() for f in fields)))
            try:
                lat, lon = float(values["lat"]), float(values["lon"])
            except (KeyError, ValueError) as exc:
                raise GeoValidationError(row, f"unparseable coordinates ({exc})") from None
            rec = GeoRecord(lat, lon, values.get("timestamp") or None, values.get("site_id") or None)
            _validate(rec, row)
            records.append(rec)
    return records
