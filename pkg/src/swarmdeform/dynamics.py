"""Collective dynamics of a leader-follower team under double-integrator control.

Leaders apply pure feedforward acceleration along their reference paths;
followers apply a weighted consensus law over their in-neighbors:

    u_i = beta_v * sum_j w_ij (v_j - v_i) + beta_r * sum_j w_ij (p_j - p_i)

The whole 2*N*d state is integrated with classical fixed-step RK4, which is
deterministic: identical inputs produce bit-identical traces.  Each sample
of the resulting Trace also records the recovered deformation map, every
agent's desired position under it, and every agent's barycentric
coordinates in the moving desired leader simplex (the containment
channels used by the temporal-logic monitors).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .continuum import WeightTable, build_weight_table, solve_transform, validate_scenario_structure
from .geometry import DegenerateSimplexError
from .trajectory import WaypointPath


@dataclass(frozen=True)
class ControlGains:
    """Follower consensus gains: position gain beta_r, velocity gain beta_v."""

    beta_r: float = 2.0
    beta_v: float = 4.0

    def __post_init__(self):
        if self.beta_r <= 0.0 or self.beta_v <= 0.0:
            raise ValueError("control gains must be positive")


class SimulationFault(RuntimeError):
    """Numerical breakdown during integration (non-finite state or collapse)."""

    def __init__(self, time: float, detail: str):
        super().__init__(f"simulation fault at t={time:.6g}: {detail}")
        self.time = time
        self.detail = detail


def follower_acceleration(
    follower_id: int,
    positions: Mapping[int, np.ndarray],
    velocities: Mapping[int, np.ndarray],
    table: WeightTable,
    gains: ControlGains,
) -> np.ndarray:
    """Consensus acceleration of one follower from neighbor states.

    Evaluates the control law exactly as stated; no containment or weight
    validation happens here.

    Raises
    ------
    KeyError
        If the follower or one of its neighbors has no recorded state.
    """
    nbrs = table.neighbors[follower_id]
    w = table.weights[follower_id]
    p_i = np.asarray(positions[follower_id], dtype=float)
    v_i = np.asarray(velocities[follower_id], dtype=float)
    acc = np.zeros_like(p_i)
    for wj, j in zip(w, nbrs):
        acc += gains.beta_v * wj * (np.asarray(velocities[j], dtype=float) - v_i)
        acc += gains.beta_r * wj * (np.asarray(positions[j], dtype=float) - p_i)
    return acc


class TraceSample:
    """Read-only view of one trace sample, keyed by agent id."""

    def __init__(self, trace: "Trace", k: int):
        self._trace = trace
        self.index = k
        self.time = float(trace.times[k])

    def actual(self, agent: int, coord: int) -> float:
        """Recorded position component (1-based coordinate index)."""
        return float(self._trace.positions[self.index, self._trace.row_of(agent), coord - 1])

    def desired(self, agent: int, coord: int) -> float:
        return float(self._trace.desired[self.index, self._trace.row_of(agent), coord - 1])

    def omega(self, agent: int, vertex: int) -> float:
        """Barycentric coordinate of the agent in the desired leader simplex."""
        if self._trace.omegas is None:
            raise ValueError("trace has no containment channels")
        return float(self._trace.omegas[self.index, self._trace.row_of(agent), vertex - 1])


@dataclass
class Trace:
    """Synchronized time series of a simulation or recorded run.

    Arrays are indexed [sample, agent_row, coordinate]; agent rows follow
    ascending agent id.  The derived channels (jacobians, translations,
    omegas) may be absent on traces built from partial data and can be
    reconstructed with with_derived().
    """

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    desired: np.ndarray
    agent_ids: tuple[int, ...]
    leader_ids: tuple[int, ...] = ()
    jacobians: Optional[np.ndarray] = None
    translations: Optional[np.ndarray] = None
    omegas: Optional[np.ndarray] = None

    def __post_init__(self):
        self._rows = {aid: k for k, aid in enumerate(self.agent_ids)}

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[1]

    @property
    def dim(self) -> int:
        return self.positions.shape[2]

    @property
    def step(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    def row_of(self, agent: int) -> int:
        try:
            return self._rows[agent]
        except KeyError:
            raise KeyError(f"agent {agent} not present in trace") from None

    def sample(self, k: int) -> TraceSample:
        if not 0 <= k < self.n_samples:
            raise IndexError(f"sample {k} out of range [0, {self.n_samples})")
        return TraceSample(self, k)

    def deviations(self) -> np.ndarray:
        """Per-sample, per-agent distance between actual and desired position."""
        return np.linalg.norm(self.positions - self.desired, axis=2)

    def prefix(self, n: int) -> "Trace":
        """Trace restricted to the first n samples."""
        if not 1 <= n <= self.n_samples:
            raise ValueError(f"prefix length {n} out of range")
        return Trace(
            times=self.times[:n],
            positions=self.positions[:n],
            velocities=self.velocities[:n],
            desired=self.desired[:n],
            agent_ids=self.agent_ids,
            leader_ids=self.leader_ids,
            jacobians=None if self.jacobians is None else self.jacobians[:n],
            translations=None if self.translations is None else self.translations[:n],
            omegas=None if self.omegas is None else self.omegas[:n],
        )

    def with_derived(self, leader_ids=None) -> "Trace":
        """Reconstruct deformation maps and containment channels.

        Uses the desired positions of the leaders, referenced to the first
        sample, to recover the affine map at every sample, then computes
        each agent's barycentric coordinates in the moving desired leader
        simplex from its actual position.
        """
        leaders = tuple(leader_ids) if leader_ids is not None else self.leader_ids
        if not leaders:
            raise ValueError("leader ids required to derive transform channels")
        d = self.dim
        if len(leaders) != d + 1:
            raise ValueError(f"need {d + 1} leaders in {d} dimensions")
        rows = [self.row_of(i) for i in leaders]
        ref = self.desired[0][rows]
        t_count = self.n_samples
        jac = np.empty((t_count, d, d))
        trans = np.empty((t_count, d))
        a = np.hstack([ref, np.ones((d + 1, 1))])
        for k in range(t_count):
            try:
                sol = np.linalg.solve(a, self.desired[k][rows])
            except np.linalg.LinAlgError as exc:
                raise DegenerateSimplexError(
                    f"degenerate leader reference configuration at sample {k}"
                ) from exc
            jac[k] = sol[:d].T
            trans[k] = sol[d]
        # Homogeneous vertex matrices of the desired leader simplex, per sample.
        m = np.empty((t_count, d + 1, d + 1))
        m[:, :d, :] = np.swapaxes(self.desired[:, rows, :], 1, 2)
        m[:, d, :] = 1.0
        minv = np.linalg.inv(m)
        hom = np.concatenate([self.positions, np.ones((t_count, self.n_agents, 1))], axis=2)
        omegas = np.einsum("tkc,tnc->tnk", minv, hom)
        return Trace(
            times=self.times,
            positions=self.positions,
            velocities=self.velocities,
            desired=self.desired,
            agent_ids=self.agent_ids,
            leader_ids=leaders,
            jacobians=jac,
            translations=trans,
            omegas=omegas,
        )


def simulate(scenario, h: Optional[float] = None, tf: Optional[float] = None) -> Trace:
    """Integrate the collective dynamics of a scenario with fixed-step RK4.

    Parameters
    ----------
    scenario:
        A structurally valid scenario (see continuum.validate_scenario_structure).
    h, tf:
        Optional overrides of the scenario's step size and final time.

    Returns
    -------
    Trace
        Samples at t0 + k*h for k = 0..K with K = round((tf - t0)/h),
        including desired positions, deformation maps and containment
        channels at every sample.

    Raises
    ------
    ValueError
        On structural violations or a non-positive step / empty horizon.
    SimulationFault
        If the state turns non-finite or the leader configuration collapses.
    """
    problems = validate_scenario_structure(scenario)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(problems))
    h = float(h if h is not None else scenario.sim.h)
    tf = float(tf if tf is not None else scenario.sim.tf)
    t0 = float(scenario.sim.t0)
    if h <= 0.0:
        raise ValueError("step size must be positive")
    if tf <= t0:
        raise ValueError("final time must exceed start time")

    agent_ids = tuple(sorted(a.id for a in scenario.agents))
    rows = {aid: k for k, aid in enumerate(agent_ids)}
    n = len(agent_ids)
    d = scenario.dimension
    agents = {a.id: a for a in scenario.agents}
    pos0 = np.array([agents[i].position for i in agent_ids], dtype=float)
    vel0 = np.array([agents[i].velocity for i in agent_ids], dtype=float)

    leader_ids = tuple(scenario.leaders)
    leader_rows = np.array([rows[i] for i in leader_ids])
    paths = {i: WaypointPath(scenario.leader_waypoints[i]) for i in leader_ids}

    table = build_weight_table(scenario)
    follower_ids = table.follower_ids()
    follower_rows = np.array([rows[i] for i in follower_ids], dtype=int)
    w_matrix = np.zeros((len(follower_ids), n))
    for fi, fid in enumerate(follower_ids):
        for wj, j in zip(table.weights[fid], table.neighbors[fid]):
            w_matrix[fi, rows[j]] = wj
    gains = scenario.gains

    def leader_accels(t: float) -> np.ndarray:
        return np.array([paths[i].acceleration(t) for i in leader_ids])

    def derivative(t: float, pos: np.ndarray, vel: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        acc = np.zeros_like(pos)
        acc[leader_rows] = leader_accels(t)
        if len(follower_rows):
            acc[follower_rows] = gains.beta_v * (w_matrix @ vel - vel[follower_rows])
            acc[follower_rows] += gains.beta_r * (w_matrix @ pos - pos[follower_rows])
        return vel, acc

    k_steps = int(round((tf - t0) / h))
    if k_steps < 1:
        raise ValueError("horizon shorter than one step")
    times = t0 + h * np.arange(k_steps + 1)

    leaders_ref = np.array([paths[i].position(t0) for i in leader_ids])

    positions = np.empty((k_steps + 1, n, d))
    velocities = np.empty((k_steps + 1, n, d))
    desired = np.empty((k_steps + 1, n, d))
    jacobians = np.empty((k_steps + 1, d, d))
    translations = np.empty((k_steps + 1, d))
    omegas = np.empty((k_steps + 1, n, d + 1))

    pos = pos0.copy()
    vel = vel0.copy()
    for k, t in enumerate(times):
        if not (np.isfinite(pos).all() and np.isfinite(vel).all()):
            bad = np.nonzero(~np.isfinite(pos).all(axis=1) | ~np.isfinite(vel).all(axis=1))[0]
            raise SimulationFault(float(t), f"non-finite state for agent {agent_ids[bad[0]]}")
        leaders_now = np.array([paths[i].position(t) for i in leader_ids])
        try:
            ht = solve_transform(leaders_ref, leaders_now, t=float(t))
        except DegenerateSimplexError as exc:
            raise SimulationFault(float(t), str(exc)) from exc
        positions[k] = pos
        velocities[k] = vel
        desired[k] = pos0 @ ht.jacobian.T + ht.translation
        jacobians[k] = ht.jacobian
        translations[k] = ht.translation
        m = np.vstack([leaders_now.T, np.ones(d + 1)])
        hom = np.hstack([pos, np.ones((n, 1))])
        omegas[k] = np.linalg.solve(m, hom.T).T

        if k == k_steps:
            break
        dp1, dv1 = derivative(t, pos, vel)
        dp2, dv2 = derivative(t + h / 2.0, pos + (h / 2.0) * dp1, vel + (h / 2.0) * dv1)
        dp3, dv3 = derivative(t + h / 2.0, pos + (h / 2.0) * dp2, vel + (h / 2.0) * dv2)
        dp4, dv4 = derivative(t + h, pos + h * dp3, vel + h * dv3)
        pos = pos + (h / 6.0) * (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4)
        vel = vel + (h / 6.0) * (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4)

    return Trace(
        times=times,
        positions=positions,
        velocities=velocities,
        desired=desired,
        agent_ids=agent_ids,
        leader_ids=leader_ids,
        jacobians=jacobians,
        translations=translations,
        omegas=omegas,
    )
