"""
Domain types for air-ground task allocation.

Owns: Position, AgentKind, Agent, Task, FamtScenario, plus the distance and
capability primitives every solver relies on. Lengths are meters and speeds
are meters per minute throughout.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .errors import DimensionError

SCHEMA_VERSION = 1

CapabilityVector = tuple  # tuple[float, ...], all components > 0


class AgentKind(str, Enum):
    UAV = "UAV"
    UGV = "UGV"


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    h: float = 0.0

    def __post_init__(self):
        for v in (self.x, self.y, self.h):
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate in {self!r}")
        if self.h < 0:
            raise ValueError(f"altitude must be >= 0, got {self.h}")

    def as_tuple(self):
        return (self.x, self.y, self.h)


def _capabilities(levels) -> tuple:
    levels = tuple(float(c) for c in levels)
    if not levels:
        raise ValueError("capability vector must be non-empty")
    if any(not (c > 0) or not math.isfinite(c) for c in levels):
        raise ValueError(f"capability components must be finite and > 0: {levels}")
    return levels


@dataclass(frozen=True)
class Agent:
    id: str
    kind: AgentKind
    position: Position
    speed: float
    capabilities: tuple
    max_travel: float
    task_limit: int

    def __post_init__(self):
        object.__setattr__(self, "kind", AgentKind(self.kind))
        object.__setattr__(self, "capabilities", _capabilities(self.capabilities))
        if not self.speed > 0:
            raise ValueError(f"agent {self.id}: speed must be > 0")
        if not self.max_travel > 0:
            raise ValueError(f"agent {self.id}: max_travel must be > 0")
        if int(self.task_limit) != self.task_limit or self.task_limit < 1:
            raise ValueError(f"agent {self.id}: task_limit must be an integer >= 1")
        if self.kind is AgentKind.UGV and self.position.h != 0:
            raise ValueError(f"agent {self.id}: UGV positions must have h = 0")


@dataclass(frozen=True)
class Task:
    id: str
    position: Position
    requirements: tuple
    max_agents: int = 1

    def __post_init__(self):
        object.__setattr__(self, "requirements", _capabilities(self.requirements))
        if int(self.max_agents) != self.max_agents or self.max_agents < 1:
            raise ValueError(f"task {self.id}: max_agents must be an integer >= 1")


@dataclass(frozen=True)
class FamtScenario:
    agents: tuple = ()
    tasks: tuple = ()
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "tasks", tuple(self.tasks))
        for label, items in (("agent", self.agents), ("task", self.tasks)):
            ids = [it.id for it in items]
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {label} ids")
        dims = {len(a.capabilities) for a in self.agents}
        dims |= {len(t.requirements) for t in self.tasks}
        if len(dims) > 1:
            raise DimensionError(f"capability vectors of mixed lengths {sorted(dims)}")


def euclidean_distance(a: Position, b: Position) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.h - b.h) ** 2)


def _check_dims(agent: Sequence[float], task: Sequence[float]):
    if len(agent) != len(task):
        raise DimensionError(
            f"capability length mismatch: agent has {len(agent)}, task has {len(task)}"
        )


def capability_coefficient(agent: Sequence[float], task: Sequence[float]) -> float:
    """2 when the agent strictly dominates the task on every component, else 1/2."""
    _check_dims(agent, task)
    return 2.0 if all(a > t for a, t in zip(agent, task)) else 0.5


def effectiveness(agent: Sequence[float], task: Sequence[float]) -> float:
    _check_dims(agent, task)
    ratio_sum = sum(a / t for a, t in zip(agent, task))
    return ratio_sum * capability_coefficient(agent, task)


def is_eligible(agent: Sequence[float], task: Sequence[float]) -> bool:
    return capability_coefficient(agent, task) == 2.0


# -- JSON ----------------------------------------------------------------------


def position_to_dict(p: Position) -> dict:
    return {"x": p.x, "y": p.y, "h": p.h}


def position_from_dict(d) -> Position:
    return Position(float(d["x"]), float(d["y"]), float(d.get("h", 0.0)))


def agent_to_dict(a: Agent) -> dict:
    return {
        "id": a.id,
        "kind": a.kind.value,
        "position": position_to_dict(a.position),
        "speed": a.speed,
        "capabilities": list(a.capabilities),
        "max_travel": a.max_travel,
        "task_limit": a.task_limit,
    }


def agent_from_dict(d) -> Agent:
    return Agent(
        id=str(d["id"]),
        kind=AgentKind(d["kind"]),
        position=position_from_dict(d["position"]),
        speed=float(d["speed"]),
        capabilities=tuple(d["capabilities"]),
        max_travel=float(d["max_travel"]),
        task_limit=int(d["task_limit"]),
    )


def task_to_dict(t: Task) -> dict:
    return {
        "id": t.id,
        "position": position_to_dict(t.position),
        "requirements": list(t.requirements),
        "max_agents": t.max_agents,
    }


def task_from_dict(d) -> Task:
    return Task(
        id=str(d["id"]),
        position=position_from_dict(d["position"]),
        requirements=tuple(d["requirements"]),
        max_agents=int(d.get("max_agents", 1)),
    )


def famt_to_dict(s: FamtScenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "type": "famt",
        "name": s.name,
        "meta": s.meta,
        "agents": [agent_to_dict(a) for a in s.agents],
        "tasks": [task_to_dict(t) for t in s.tasks],
    }


def famt_from_dict(d) -> FamtScenario:
    _check_schema(d, "famt")
    return FamtScenario(
        agents=[agent_from_dict(a) for a in d["agents"]],
        tasks=[task_from_dict(t) for t in d["tasks"]],
        name=d.get("name", ""),
        meta=d.get("meta", {}),
    )


def _check_schema(d, kind):
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r}")
    if d.get("type", kind) != kind:
        raise ValueError(f"expected a {kind!r} document, got {d.get('type')!r}")


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def content_hash(doc) -> str:
    """Short stable digest of a JSON-able document, used to pair benchmark rows."""
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()[:16]
