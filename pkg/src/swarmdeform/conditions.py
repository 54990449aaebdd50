"""Builders for the eight monitored safety and liveness conditions.

Given a scenario, each builder instantiates one condition as a closed-form
temporal formula over trace quantities:

  1  tracking      every agent stays within the deviation bound of its
                   desired position
  2  containment   every follower stays inside the moving desired leader
                   simplex (via the trace's containment channels)
  3  separation    every unordered agent pair keeps distance >= twice the
                   agent radius
  4  motion space  every agent stays inside the union of workspace cells
  5  obstacles     no agent enters any obstacle cell
  6  liveness      eventually every agent settles within a tolerance of
                   its final position, and stays there through the end
  7  motion space, leaders only (sufficient-condition companion of 4)
  8  obstacles, leaders only (sufficient-condition companion of 5)

Static cells (4, 5, 7, 8) expand into affine atoms with precomputed
inverse-matrix coefficients; the moving leader simplex (2) reads the
trace's per-agent barycentric channels instead.

A nonzero margin_inflate rho tightens the sampled checks: the deviation
bound shrinks to delta - rho, the separation radius grows to epsilon +
rho, and containment atoms require barycentric slack rho (dimensionless).
The liveness tolerance is left untouched.  Strict containment swaps the
closed >= 0 atoms for strict > 0 ones.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .geometry import Simplex
from .ltl import (
    ActualVar,
    BinOp,
    Const,
    DesiredVar,
    Expr,
    Formula,
    Leq,
    Not,
    OmegaVar,
    always,
    conj,
    disj,
    eventually,
)

PSI_NAMES = tuple(f"psi{i}" for i in range(1, 9))


def _sum(terms) -> Expr:
    return reduce(lambda a, b: BinOp("+", a, b), terms)


def _sq(e: Expr) -> Expr:
    return BinOp("*", e, e)


def _sq_dist_to_desired(agent: int, dim: int) -> Expr:
    return _sum(
        _sq(BinOp("-", ActualVar(agent, c), DesiredVar(agent, c))) for c in range(1, dim + 1)
    )


def _sq_dist_between(i: int, j: int, dim: int) -> Expr:
    return _sum(
        _sq(BinOp("-", ActualVar(i, c), ActualVar(j, c))) for c in range(1, dim + 1)
    )


def _sq_dist_to_point(agent: int, point: np.ndarray) -> Expr:
    return _sum(
        _sq(BinOp("-", ActualVar(agent, c + 1), Const(float(point[c]))))
        for c in range(len(point))
    )


def _affine_coordinate(cell: Simplex, agent: int, k: int) -> Expr:
    """Barycentric coordinate k of an agent's position in a fixed cell,
    as an affine expression with precomputed coefficients."""
    inv = cell.inverse_matrix()
    d = cell.dim
    terms = [BinOp("*", Const(float(inv[k, c])), ActualVar(agent, c + 1)) for c in range(d)]
    terms.append(Const(float(inv[k, d])))
    return _sum(terms)


def _coordinate_atom(expr: Expr, threshold: float, strict: bool) -> Formula:
    if strict:
        return Not(Leq(expr, Const(threshold)))
    return Leq(Const(threshold), expr)


def _inside_cell(cell: Simplex, agent: int, threshold: float, strict: bool) -> Formula:
    return conj(
        _coordinate_atom(_affine_coordinate(cell, agent, k), threshold, strict)
        for k in range(cell.dim + 1)
    )


def build_psi(
    scenario,
    which: int,
    margin_inflate: float = 0.0,
    strict_containment: bool = False,
) -> Formula:
    """Instantiate condition `which` (1-8) for a scenario.

    Raises
    ------
    ValueError
        For an unknown condition number or missing scenario data (empty
        motion space for 4/7, absent final positions for 6).
    """
    rho = float(margin_inflate)
    d = scenario.dimension
    ids = sorted(a.id for a in scenario.agents)
    followers = sorted(f.id for f in scenario.followers)
    leaders = list(scenario.leaders)

    if which == 1:
        bound = max(scenario.margins.deviation_bound - rho, 0.0)
        return conj(
            always(Leq(_sq_dist_to_desired(i, d), Const(bound**2))) for i in ids
        )

    if which == 2:
        return conj(
            always(
                conj(
                    _coordinate_atom(OmegaVar(i, k), rho, strict_containment)
                    for k in range(1, d + 2)
                )
            )
            for i in followers
        )

    if which == 3:
        gap = 2.0 * (scenario.margins.agent_radius + rho)
        return conj(
            always(Leq(Const(gap**2), _sq_dist_between(i, j, d)))
            for i in ids
            for j in ids
            if i < j
        )

    if which in (4, 7):
        if not scenario.motion_space:
            raise ValueError("scenario has no motion-space cells")
        members = ids if which == 4 else leaders
        return conj(
            always(
                disj(
                    _inside_cell(cell, i, rho, strict_containment)
                    for cell in scenario.motion_space
                )
            )
            for i in members
        )

    if which in (5, 8):
        members = ids if which == 5 else leaders
        return conj(
            always(
                conj(
                    Not(_inside_cell(cell, i, -rho, strict=False))
                    for cell in scenario.obstacles
                )
            )
            for i in members
        )

    if which == 6:
        if not scenario.final_positions:
            raise ValueError("scenario has no final positions for the liveness condition")
        tol = scenario.margins.liveness_tol
        missing = [i for i in ids if i not in scenario.final_positions]
        if missing:
            raise ValueError(f"final positions missing for agents {missing}")
        return eventually(
            always(
                conj(
                    Leq(
                        _sq_dist_to_point(i, np.asarray(scenario.final_positions[i], float)),
                        Const(tol**2),
                    )
                    for i in ids
                )
            )
        )

    raise ValueError(f"unknown condition number {which}; expected 1-8")


def build_conditions(
    scenario,
    names=PSI_NAMES,
    margin_inflate: float = 0.0,
    strict_containment: bool = False,
) -> dict[str, Formula]:
    """Build a name -> Formula table for the requested psi conditions."""
    out = {}
    for name in names:
        if name not in PSI_NAMES:
            raise ValueError(f"unknown condition name {name!r}")
        out[name] = build_psi(
            scenario, int(name[3:]), margin_inflate=margin_inflate,
            strict_containment=strict_containment,
        )
    return out
