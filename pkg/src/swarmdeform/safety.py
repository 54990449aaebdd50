"""Sufficient-condition analytics for continuum-deformation safety.

From the initial formation alone, two margins are computed: the smallest
inter-agent separation and the smallest follower-to-boundary distance
inside the leading simplex.  They bound how far agents may stray from
their desired positions (delta_max) and how much the deformation may
compress (lambda_min) while separation and containment remain guaranteed.

A recorded run then satisfies the main sufficient condition if, at every
sample, all eigenvalues of the pure deformation part of the leader map
stay at or above lambda_min while no agent deviates from its desired
position by more than the deviation bound.  Two companion checks settle
workspace containment and obstacle avoidance for the whole team from the
leaders alone, contingent on follower containment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .continuum import DET_TOL, HomogeneousTransform
from .geometry import CONTAIN_TOL, Simplex, boundary_distance, min_pairwise_distance


@dataclass(frozen=True)
class SafetyMargins:
    """Initial-formation margins and the derived deformation bounds.

    min_separation is the smallest initial inter-agent distance;
    min_boundary_distance the smallest follower distance to the leading
    simplex boundary.  delta_max bounds admissible deviations,
    lambda_min the admissible deformation compression.  feasible records
    whether the configured deviation bound fits under delta_max.
    """

    min_separation: float
    min_boundary_distance: float
    agent_radius: float
    deviation_bound: float
    delta_max: float
    lambda_min: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "D_B": self.min_separation,
            "D_S": self.min_boundary_distance,
            "agent_radius": self.agent_radius,
            "deviation_bound": self.deviation_bound,
            "delta_max": self.delta_max,
            "lambda_min": self.lambda_min,
            "feasible": self.feasible,
        }


def derive_margins(
    min_separation: float,
    min_boundary_distance: float,
    agent_radius: float,
    deviation_bound: float,
) -> SafetyMargins:
    """Pure margin arithmetic from the two formation distances.

    delta_max = min{ (min_separation - 2*radius)/2, min_boundary - radius }
    lambda_min = (deviation_bound + radius) / (delta_max + radius)
    """
    delta_max = min(
        0.5 * (min_separation - 2.0 * agent_radius),
        min_boundary_distance - agent_radius,
    )
    denom = delta_max + agent_radius
    lambda_min = (deviation_bound + agent_radius) / denom if denom > 0.0 else float("inf")
    return SafetyMargins(
        min_separation=float(min_separation),
        min_boundary_distance=float(min_boundary_distance),
        agent_radius=float(agent_radius),
        deviation_bound=float(deviation_bound),
        delta_max=float(delta_max),
        lambda_min=float(lambda_min),
        feasible=bool(deviation_bound <= delta_max),
    )


def compute_margins(scenario) -> SafetyMargins:
    """Margins of a validated scenario's initial formation.

    Raises
    ------
    GeometryError
        If a follower starts outside the leading simplex (the boundary
        distance is undefined there).
    """
    positions = {a.id: np.asarray(a.position, float) for a in scenario.agents}
    pts = [positions[i] for i in sorted(positions)]
    d_b, _ = min_pairwise_distance(pts)
    leading = Simplex([positions[i] for i in scenario.leaders])
    d_s = min(
        boundary_distance(leading, positions[f.id]) for f in scenario.followers
    )
    return derive_margins(
        d_b, d_s, scenario.margins.agent_radius, scenario.margins.deviation_bound
    )


def deformation_eigenvalues(transform) -> np.ndarray:
    """Eigenvalues of the pure deformation part of a map, ascending.

    These equal the singular values of the jacobian Q: with polar
    decomposition Q = R U, the symmetric factor U = (Q^T Q)^(1/2) has the
    singular values of Q as its eigenvalues.

    Accepts a HomogeneousTransform or a bare square matrix.

    Raises
    ------
    ValueError
        If Q is singular.
    """
    q = transform.jacobian if isinstance(transform, HomogeneousTransform) else np.asarray(transform, float)
    if abs(np.linalg.det(q)) <= DET_TOL:
        raise ValueError("jacobian is singular; deformation eigenvalues undefined")
    sv = np.linalg.svd(q, compute_uv=False)
    return sv[::-1].copy()


def deformation_spectrum(trace) -> np.ndarray:
    """Per-sample deformation eigenvalues along a trace, ascending columns.

    Requires the trace's transform channels (see Trace.with_derived).
    """
    if trace.jacobians is None:
        raise ValueError("trace lacks transform channels; derive them first")
    sv = np.linalg.svd(trace.jacobians, compute_uv=False)
    return sv[:, ::-1].copy()


@dataclass(frozen=True)
class TheoremVerdict:
    """Outcome of the sampled sufficient-condition check."""

    satisfied: bool
    min_eigenvalue: float
    max_deviation: float
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "satisfied": self.satisfied,
            "min_eigenvalue": self.min_eigenvalue,
            "max_deviation": self.max_deviation,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def check_theorem1(trace, margins: SafetyMargins) -> TheoremVerdict:
    """Sampled check of the main sufficient condition.

    Satisfied iff at every sample (a) all deformation eigenvalues are at
    least margins.lambda_min and (b) every agent's deviation from its
    desired position is at most margins.deviation_bound.  On success,
    separation (psi3) and follower containment (psi2) are certified.

    Raises
    ------
    ValueError
        If the margins are infeasible (the theorem is inapplicable) or
        the trace lacks transform channels.
    """
    if not margins.feasible:
        raise ValueError("margins are infeasible; sufficient condition inapplicable")
    spectrum = deformation_spectrum(trace)
    deviations = trace.deviations()
    min_eig_per_sample = spectrum[:, 0]
    max_dev_per_sample = deviations.max(axis=1)
    eig_bad = min_eig_per_sample < margins.lambda_min
    dev_bad = max_dev_per_sample > margins.deviation_bound
    witness = None
    satisfied = not (eig_bad.any() or dev_bad.any())
    if not satisfied:
        k = int(np.argmax(eig_bad | dev_bad))
        if eig_bad[k]:
            witness = {
                "sample": k,
                "t": float(trace.times[k]),
                "kind": "eigenvalue",
                "value": float(min_eig_per_sample[k]),
                "bound": margins.lambda_min,
            }
        else:
            agent_row = int(np.argmax(deviations[k]))
            witness = {
                "sample": k,
                "t": float(trace.times[k]),
                "kind": "deviation",
                "agent": int(trace.agent_ids[agent_row]),
                "value": float(deviations[k, agent_row]),
                "bound": margins.deviation_bound,
            }
    return TheoremVerdict(
        satisfied=satisfied,
        min_eigenvalue=float(min_eig_per_sample.min()),
        max_deviation=float(max_dev_per_sample.max()),
        witness=witness,
    )


@dataclass(frozen=True)
class LeaderCheckVerdict:
    """Leader-only containment/avoidance sweep outcome."""

    name: str
    satisfied: bool
    certifies: str
    requires: str
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "satisfied": self.satisfied,
            "certifies": self.certifies,
            "requires": self.requires,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _containment_flags(cells, positions: np.ndarray) -> np.ndarray:
    """Closed containment of positions (T, L, d) in each cell -> (T, L, n_cells)."""
    t_count, n_pts, d = positions.shape
    hom = np.concatenate([positions, np.ones((t_count, n_pts, 1))], axis=2)
    flags = np.empty((t_count, n_pts, len(cells)), dtype=bool)
    for c, cell in enumerate(cells):
        alpha = hom @ cell.inverse_matrix().T
        flags[:, :, c] = np.all(alpha >= -CONTAIN_TOL, axis=2)
    return flags


def check_leader_only(trace, scenario, which: str) -> LeaderCheckVerdict:
    """Leader-only workspace containment (psi7) or obstacle avoidance (psi8).

    Geometric sweep with closed containment: psi7 requires every leader
    inside some workspace cell at every sample; psi8 requires every leader
    outside every obstacle cell at every sample.  A pass certifies the
    corresponding full-team condition (psi4 / psi5), contingent on a
    follower-containment (psi2) certificate.
    """
    if which not in ("psi7", "psi8"):
        raise ValueError(f"unknown leader-only check {which!r}")
    rows = [trace.row_of(i) for i in scenario.leaders]
    positions = trace.positions[:, rows, :]
    if which == "psi7":
        if not scenario.motion_space:
            raise ValueError("scenario has no motion-space cells")
        flags = _containment_flags(scenario.motion_space, positions)
        inside_some = flags.any(axis=2)
        satisfied = bool(inside_some.all())
        witness = None
        if not satisfied:
            k, li = np.unravel_index(int(np.argmin(inside_some)), inside_some.shape)
            witness = {
                "sample": int(k),
                "t": float(trace.times[k]),
                "agent": int(scenario.leaders[li]),
            }
        return LeaderCheckVerdict("psi7", satisfied, "psi4", "psi2", witness)
    flags = _containment_flags(scenario.obstacles, positions)
    satisfied = not bool(flags.any())
    witness = None
    if not satisfied:
        k, li, cell = np.unravel_index(int(np.argmax(flags)), flags.shape)
        witness = {
            "sample": int(k),
            "t": float(trace.times[k]),
            "agent": int(scenario.leaders[li]),
            "cell": int(cell),
        }
    return LeaderCheckVerdict("psi8", satisfied, "psi5", "psi2", witness)
