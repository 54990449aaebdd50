"""Homogeneous (affine) deformation of a leader-defined formation.

A team of n agents in d dimensions is steered by d+1 leaders whose desired
positions at any time are an affine image of their initial positions:

    r_i_desired(t) = Q(t) @ r_i(0) + b(t)

with Q square and invertible.  Because d+1 affinely independent leaders pin
down the map uniquely, Q and b are recovered at runtime from leader
positions alone, and every follower inherits its desired position through
the same map.  Followers track the map indirectly, by consensus on their
in-neighbors with fixed weights chosen so the weighted neighbor average
reproduces the follower's own initial position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import DegenerateSimplexError, Simplex, barycentric, contains

# |det Q| at or below this threshold means the leader configuration has
# collapsed and the affine map is no longer invertible.
DET_TOL = 1e-12

# A stored follower weight vector may differ from the one recomputed from
# initial positions by at most this much (max-norm).
WEIGHT_MISMATCH_TOL = 1e-6


@dataclass(frozen=True)
class HomogeneousTransform:
    """Affine map ``p -> jacobian @ p + translation`` at a given time."""

    jacobian: np.ndarray
    translation: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.asarray(self.jacobian, dtype=float)
        b = np.asarray(self.translation, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("jacobian must be square")
        if b.shape != (q.shape[0],):
            raise ValueError("translation length must match jacobian size")
        object.__setattr__(self, "jacobian", q)
        object.__setattr__(self, "translation", b)

    @classmethod
    def identity(cls, dim: int, t: float = 0.0) -> "HomogeneousTransform":
        return cls(np.eye(dim), np.zeros(dim), t)

    @property
    def dim(self) -> int:
        return self.jacobian.shape[0]

    def apply(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        return self.jacobian @ p + self.translation


def solve_transform(leaders_ref, leaders_now, t: float = 0.0) -> HomogeneousTransform:
    """Recover the affine map sending reference leader positions to current ones.

    Solves the single (d+1)x(d+1) linear system

        [P_ref  1] @ [Q^T; b^T] = P_now

    where P_ref and P_now stack the d+1 leader positions row-wise.  The
    reference configuration must be affinely independent and the recovered
    jacobian must stay invertible (|det Q| > DET_TOL).

    Raises
    ------
    DegenerateSimplexError
        If the reference leaders are affinely dependent or the recovered
        map is singular.
    """
    p0 = np.asarray(leaders_ref, dtype=float)
    p1 = np.asarray(leaders_now, dtype=float)
    if p0.shape != p1.shape:
        raise ValueError("leader position arrays must have matching shapes")
    n, d = p0.shape
    if n != d + 1:
        raise ValueError(f"need {d + 1} leaders in {d} dimensions, got {n}")
    a = np.hstack([p0, np.ones((n, 1))])
    try:
        sol = np.linalg.solve(a, p1)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSimplexError("reference leader configuration is degenerate") from exc
    q = sol[:d].T
    b = sol[d]
    if abs(np.linalg.det(q)) <= DET_TOL:
        raise DegenerateSimplexError(f"recovered jacobian is singular at t={t}")
    return HomogeneousTransform(q, b, t)


def desired_position(transform: HomogeneousTransform, initial_position) -> np.ndarray:
    """Desired position of an agent under the current deformation map."""
    return transform.apply(initial_position)


def communication_weights(neighbor_positions, follower_position) -> np.ndarray:
    """Consensus weights of a follower over its d+1 in-neighbors.

    The weights are the barycentric coordinates of the follower's initial
    position in the simplex of its neighbors' initial positions, so the
    weighted neighbor average reconstructs the follower exactly.  The
    follower must sit strictly inside that simplex, making all weights
    positive.

    Raises
    ------
    DegenerateSimplexError
        If the neighbor positions are affinely dependent.
    ValueError
        If the follower is not strictly inside the neighbor simplex.
    """
    simplex = Simplex(neighbor_positions)
    if not contains(simplex, follower_position, closed=False):
        raise ValueError("follower must lie strictly inside its neighbor simplex")
    return barycentric(simplex, follower_position)


@dataclass(frozen=True)
class WeightTable:
    """Per-follower in-neighbor ids and consensus weights."""

    neighbors: dict[int, tuple[int, ...]] = field(default_factory=dict)
    weights: dict[int, np.ndarray] = field(default_factory=dict)

    def follower_ids(self) -> list[int]:
        return sorted(self.neighbors)


def validate_scenario_structure(scenario) -> list[str]:
    """Structural soundness checks for a scenario; returns violation messages.

    Checks, in order: (a) leader count is dimension+1 and the leaders span
    the space, (b) every follower starts strictly inside the leaders'
    simplex, (c) every follower has exactly dimension+1 in-neighbors whose
    initial positions are affinely independent and strictly surround it,
    and (d) any stored weights match the ones recomputed from initial
    positions within WEIGHT_MISMATCH_TOL.

    An empty list means the scenario is structurally valid.  Violations are
    reported as data rather than raised, so callers can surface all of them
    at once.
    """
    problems: list[str] = []
    d = scenario.dimension
    positions = {a.id: a.position for a in scenario.agents}

    if len(scenario.leaders) != d + 1:
        problems.append(
            f"expected {d + 1} leaders for dimension {d}, got {len(scenario.leaders)}"
        )
        return problems

    leader_pts = np.array([positions[i] for i in scenario.leaders])
    try:
        leading = Simplex(leader_pts)
    except DegenerateSimplexError:
        problems.append("leader initial positions are affinely dependent")
        return problems

    follower_ids = {f.id for f in scenario.followers}
    for fid in sorted(follower_ids):
        if not contains(leading, positions[fid], closed=False):
            problems.append(f"follower {fid} does not start strictly inside the leading simplex")

    for spec in scenario.followers:
        if len(spec.neighbors) != d + 1:
            problems.append(
                f"follower {spec.id} has {len(spec.neighbors)} in-neighbors, expected {d + 1}"
            )
            continue
        nbr_pts = np.array([positions[j] for j in spec.neighbors])
        try:
            w = communication_weights(nbr_pts, positions[spec.id])
        except DegenerateSimplexError:
            problems.append(f"follower {spec.id}: neighbor positions are affinely dependent")
            continue
        except ValueError:
            problems.append(
                f"follower {spec.id} is not strictly inside its neighbor simplex"
            )
            continue
        if spec.weights is not None:
            stored = np.asarray(spec.weights, dtype=float)
            if stored.shape != w.shape or np.max(np.abs(stored - w)) > WEIGHT_MISMATCH_TOL:
                problems.append(
                    f"follower {spec.id}: stored weights disagree with recomputed weights"
                )
    return problems


def build_weight_table(scenario) -> WeightTable:
    """Recompute the full weight table from initial positions."""
    positions = {a.id: a.position for a in scenario.agents}
    neighbors: dict[int, tuple[int, ...]] = {}
    weights: dict[int, np.ndarray] = {}
    for spec in scenario.followers:
        nbr_pts = np.array([positions[j] for j in spec.neighbors])
        w = communication_weights(nbr_pts, positions[spec.id])
        neighbors[spec.id] = tuple(spec.neighbors)
        weights[spec.id] = w
    return WeightTable(neighbors, weights)
