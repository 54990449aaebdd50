"""Scenario files: the complete description of one coordination problem.

A scenario bundles the team (agents, leader ids, follower neighbor
triples), the leaders' timed waypoints, the workspace and obstacle cells,
the safety margins, control gains and integration parameters.  Scenarios
are stored as versioned JSON (``"schema": 1``); loading validates the
schema first, then the structural soundness of the formation, and reports
every violation found rather than stopping at the first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .continuum import validate_scenario_structure
from .dynamics import ControlGains
from .geometry import GeometryError, Simplex

SCHEMA_VERSION = 1

# Waypoint sanity bounds used at load time.
_WAYPOINT_START_TOL = 1e-9


class ScenarioError(ValueError):
    """Scenario parsing or validation failure; carries all messages."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class AgentInit:
    id: int
    position: np.ndarray
    velocity: np.ndarray


@dataclass
class FollowerSpec:
    id: int
    neighbors: tuple[int, ...]
    weights: Optional[np.ndarray] = None


@dataclass
class MarginParams:
    deviation_bound: float
    agent_radius: float
    liveness_tol: float = 0.05


@dataclass
class SimParams:
    h: float = 0.01
    tf: float = 10.0
    t0: float = 0.0


@dataclass
class Scenario:
    dimension: int
    agents: list[AgentInit]
    leaders: tuple[int, ...]
    followers: list[FollowerSpec]
    leader_waypoints: dict[int, list[tuple[float, np.ndarray]]]
    motion_space: list[Simplex]
    obstacles: list[Simplex]
    gains: ControlGains
    margins: MarginParams
    sim: SimParams
    final_positions: dict[int, np.ndarray] = field(default_factory=dict)

    def agent_ids(self) -> tuple[int, ...]:
        return tuple(sorted(a.id for a in self.agents))

    def follower_ids(self) -> tuple[int, ...]:
        return tuple(sorted(f.id for f in self.followers))

    def initial_positions(self) -> dict[int, np.ndarray]:
        return {a.id: a.position for a in self.agents}

    def leading_simplex(self) -> Simplex:
        positions = self.initial_positions()
        return Simplex([positions[i] for i in self.leaders])


def _point(value, dim: int, what: str, problems: list[str]) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        problems.append(f"{what}: not numeric")
        return np.zeros(dim)
    if arr.shape != (dim,):
        problems.append(f"{what}: expected {dim} coordinates")
        return np.zeros(dim)
    if not np.isfinite(arr).all():
        problems.append(f"{what}: non-finite value")
    return arr


def scenario_from_dict(data: dict) -> Scenario:
    """Build a Scenario from parsed JSON, collecting all schema violations.

    Raises
    ------
    ScenarioError
        Listing every violation found.
    """
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ScenarioError("scenario root must be a JSON object")
    if data.get("schema") != SCHEMA_VERSION:
        problems.append(f"schema version must be {SCHEMA_VERSION}")

    dim = data.get("dimension")
    if dim not in (2, 3):
        problems.append("dimension must be 2 or 3")
        raise ScenarioError(problems)

    agents: list[AgentInit] = []
    seen: set[int] = set()
    raw_agents = data.get("agents")
    if not isinstance(raw_agents, list) or not raw_agents:
        problems.append("agents must be a non-empty list")
        raise ScenarioError(problems)
    for idx, raw in enumerate(raw_agents):
        if not isinstance(raw, dict) or not isinstance(raw.get("id"), int):
            problems.append(f"agents[{idx}]: missing integer id")
            continue
        aid = raw["id"]
        if aid in seen:
            problems.append(f"agents[{idx}]: duplicate id {aid}")
            continue
        seen.add(aid)
        pos = _point(raw.get("position"), dim, f"agent {aid} position", problems)
        if "velocity" in raw:
            vel = _point(raw["velocity"], dim, f"agent {aid} velocity", problems)
        else:
            vel = np.zeros(dim)
        agents.append(AgentInit(aid, pos, vel))
    ids = {a.id for a in agents}

    leaders = tuple(data.get("leaders") or ())
    if len(leaders) != dim + 1:
        problems.append(f"leaders must list exactly {dim + 1} agent ids (got {len(leaders)})")
    if len(set(leaders)) != len(leaders):
        problems.append("leaders contains duplicates")
    for lid in leaders:
        if lid not in ids:
            problems.append(f"leader {lid} is not a declared agent")

    followers: list[FollowerSpec] = []
    for idx, raw in enumerate(data.get("followers") or []):
        if not isinstance(raw, dict) or not isinstance(raw.get("id"), int):
            problems.append(f"followers[{idx}]: missing integer id")
            continue
        fid = raw["id"]
        if fid not in ids:
            problems.append(f"follower {fid} is not a declared agent")
            continue
        if fid in leaders:
            problems.append(f"agent {fid} is listed as both leader and follower")
            continue
        nbrs = tuple(raw.get("neighbors") or ())
        if len(nbrs) != dim + 1:
            problems.append(f"follower {fid} must have exactly {dim + 1} in-neighbors")
        if len(set(nbrs)) != len(nbrs) or fid in nbrs:
            problems.append(f"follower {fid} neighbor list is invalid")
        for j in nbrs:
            if j not in ids:
                problems.append(f"follower {fid} references unknown neighbor {j}")
        weights = None
        if raw.get("weights") is not None:
            weights = np.asarray(raw["weights"], dtype=float)
            if weights.shape != (dim + 1,):
                problems.append(f"follower {fid} weights must have {dim + 1} entries")
        followers.append(FollowerSpec(fid, nbrs, weights))
    follower_ids = {f.id for f in followers}
    uncovered = ids - set(leaders) - follower_ids
    if uncovered:
        problems.append(f"agents neither leader nor follower: {sorted(uncovered)}")

    sim_raw = data.get("sim") or {}
    sim = SimParams(
        h=float(sim_raw.get("h", 0.01)),
        tf=float(sim_raw.get("tf", 10.0)),
        t0=float(sim_raw.get("t0", 0.0)),
    )
    if sim.h <= 0.0:
        problems.append("sim.h must be positive")
    if sim.tf <= sim.t0:
        problems.append("sim.tf must exceed sim.t0")

    waypoints: dict[int, list[tuple[float, np.ndarray]]] = {}
    raw_wps = data.get("leader_waypoints") or {}
    positions = {a.id: a.position for a in agents}
    for lid in leaders:
        raw_list = raw_wps.get(str(lid), raw_wps.get(lid))
        if not raw_list:
            problems.append(f"leader {lid} has no waypoints")
            continue
        wps = []
        for widx, pair in enumerate(raw_list):
            try:
                t_val = float(pair[0])
            except (TypeError, ValueError, IndexError, KeyError):
                problems.append(f"leader {lid} waypoint {widx}: malformed")
                continue
            pt = _point(pair[1], dim, f"leader {lid} waypoint {widx}", problems)
            wps.append((t_val, pt))
        if not wps:
            continue
        times = [t for t, _ in wps]
        if any(b <= a for a, b in zip(times, times[1:])):
            problems.append(f"leader {lid} waypoint times must be strictly increasing")
        if abs(times[0] - sim.t0) > _WAYPOINT_START_TOL:
            problems.append(f"leader {lid} first waypoint time must equal sim.t0")
        if lid in positions and np.linalg.norm(wps[0][1] - positions[lid]) > _WAYPOINT_START_TOL:
            problems.append(
                f"leader {lid} first waypoint must coincide with its initial position"
            )
        waypoints[lid] = wps

    def _cells(key: str) -> list[Simplex]:
        cells = []
        for cidx, raw_cell in enumerate(data.get(key) or []):
            try:
                cells.append(Simplex(raw_cell))
            except GeometryError as exc:
                problems.append(f"{key}[{cidx}]: {exc}")
        return cells

    motion_space = _cells("motion_space")
    obstacles = _cells("obstacles")

    final_positions: dict[int, np.ndarray] = {}
    raw_final = data.get("final_positions") or {}
    for key, value in raw_final.items():
        try:
            aid = int(key)
        except (TypeError, ValueError):
            problems.append(f"final_positions key {key!r} is not an agent id")
            continue
        if aid not in ids:
            problems.append(f"final_positions references unknown agent {aid}")
            continue
        final_positions[aid] = _point(value, dim, f"final position of agent {aid}", problems)
    if final_positions and set(final_positions) != ids:
        problems.append("final_positions must cover every agent when present")

    gains_raw = data.get("gains") or {}
    try:
        gains = ControlGains(
            beta_r=float(gains_raw.get("beta_r", 2.0)),
            beta_v=float(gains_raw.get("beta_v", 4.0)),
        )
    except ValueError as exc:
        problems.append(f"gains: {exc}")
        gains = ControlGains()

    margins_raw = data.get("margins") or {}
    margins = MarginParams(
        deviation_bound=float(margins_raw.get("deviation_bound", 0.0)),
        agent_radius=float(margins_raw.get("agent_radius", 0.0)),
        liveness_tol=float(margins_raw.get("liveness_tol", 0.05)),
    )
    if margins.deviation_bound <= 0.0:
        problems.append("margins.deviation_bound must be positive")
    if margins.agent_radius <= 0.0:
        problems.append("margins.agent_radius must be positive")
    if margins.liveness_tol <= 0.0:
        problems.append("margins.liveness_tol must be positive")

    if problems:
        raise ScenarioError(problems)
    return Scenario(
        dimension=dim,
        agents=agents,
        leaders=leaders,
        followers=followers,
        leader_waypoints=waypoints,
        motion_space=motion_space,
        obstacles=obstacles,
        gains=gains,
        margins=margins,
        sim=sim,
        final_positions=final_positions,
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    data = {
        "schema": SCHEMA_VERSION,
        "dimension": scenario.dimension,
        "agents": [
            {
                "id": a.id,
                "position": [float(x) for x in a.position],
                "velocity": [float(x) for x in a.velocity],
            }
            for a in scenario.agents
        ],
        "leaders": list(scenario.leaders),
        "followers": [
            {
                "id": f.id,
                "neighbors": list(f.neighbors),
                **(
                    {"weights": [float(w) for w in f.weights]}
                    if f.weights is not None
                    else {}
                ),
            }
            for f in scenario.followers
        ],
        "leader_waypoints": {
            str(lid): [[float(t), [float(x) for x in p]] for t, p in wps]
            for lid, wps in scenario.leader_waypoints.items()
        },
        "motion_space": [
            [[float(x) for x in v] for v in cell.vertices] for cell in scenario.motion_space
        ],
        "obstacles": [
            [[float(x) for x in v] for v in cell.vertices] for cell in scenario.obstacles
        ],
        "gains": {"beta_r": scenario.gains.beta_r, "beta_v": scenario.gains.beta_v},
        "margins": {
            "deviation_bound": scenario.margins.deviation_bound,
            "agent_radius": scenario.margins.agent_radius,
            "liveness_tol": scenario.margins.liveness_tol,
        },
        "sim": {"h": scenario.sim.h, "tf": scenario.sim.tf, "t0": scenario.sim.t0},
    }
    if scenario.final_positions:
        data["final_positions"] = {
            str(aid): [float(x) for x in p] for aid, p in scenario.final_positions.items()
        }
    return data


def load_scenario(path, strict: bool = True) -> Scenario:
    """Load and validate a scenario JSON file.

    With strict=True (the default) structural violations -- degenerate
    leader configuration, followers outside simplexes, weight mismatches --
    fail the load with itemized messages.  strict=False performs schema
    validation only, for diagnostic commands that inspect broken scenarios.

    Raises
    ------
    ScenarioError
        On parse, schema or structural violations.
    OSError
        If the file cannot be read.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    scenario = scenario_from_dict(data)
    if strict:
        structural = validate_scenario_structure(scenario)
        if structural:
            raise ScenarioError(structural)
    return scenario


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
