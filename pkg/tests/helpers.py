"""Shared scenario builders and oracles for the test suite."""

from __future__ import annotations

import numpy as np

from swarmdeform.scenario import Scenario, scenario_from_dict


def triangle_scenario(
    moving: bool = False,
    tf: float = 6.0,
    h: float = 0.01,
    follower_pos=(2.0, 2.0),
    deviation_bound: float = 0.2,
) -> Scenario:
    """Four agents in the plane: three leaders spanning a triangle, one follower.

    With moving=True the leaders translate by (4, 1) and shrink to 80%
    over one rest-to-rest segment, then hold.
    """
    leaders0 = {1: [0.0, 0.0], 2: [6.0, 0.0], 3: [0.0, 6.0]}
    shift = np.array([4.0, 1.0])
    scale = 0.8
    center = np.array([2.0, 2.0])

    def final_of(p):
        p = np.asarray(p, dtype=float)
        return (center + scale * (p - center) + shift).tolist()

    waypoints = {}
    for lid, p in leaders0.items():
        if moving:
            waypoints[str(lid)] = [[0.0, p], [0.6 * tf, final_of(p)]]
        else:
            waypoints[str(lid)] = [[0.0, p]]

    final_positions = {
        "1": final_of(leaders0[1]) if moving else leaders0[1],
        "2": final_of(leaders0[2]) if moving else leaders0[2],
        "3": final_of(leaders0[3]) if moving else leaders0[3],
        "4": final_of(follower_pos) if moving else list(map(float, follower_pos)),
    }

    data = {
        "schema": 1,
        "dimension": 2,
        "agents": [
            {"id": 1, "position": leaders0[1]},
            {"id": 2, "position": leaders0[2]},
            {"id": 3, "position": leaders0[3]},
            {"id": 4, "position": list(map(float, follower_pos))},
        ],
        "leaders": [1, 2, 3],
        "followers": [{"id": 4, "neighbors": [1, 2, 3]}],
        "leader_waypoints": waypoints,
        "motion_space": [
            [[-8.0, -8.0], [22.0, -8.0], [22.0, 14.0]],
            [[-8.0, -8.0], [22.0, 14.0], [-8.0, 14.0]],
        ],
        "obstacles": [
            [[15.0, -6.0], [17.0, -6.0], [16.0, -4.0]],
        ],
        "final_positions": final_positions,
        "gains": {"beta_r": 2.0, "beta_v": 4.0},
        "margins": {
            "deviation_bound": deviation_bound,
            "agent_radius": 0.25,
            "liveness_tol": 0.05,
        },
        "sim": {"h": h, "tf": tf, "t0": 0.0},
    }
    return scenario_from_dict(data)


def random_formula(rng: np.random.Generator, depth: int, agent_ids=(1, 2, 3), dim: int = 2):
    """Random temporal formula over small traces, for oracle comparisons."""
    from swarmdeform.ltl import Leq, Not, Or, TRUE, Until

    def expr(d):
        kind = rng.integers(0, 5 if d > 0 else 4)
        if kind == 0:
            return _const(rng)
        if kind == 1:
            return _var(rng, "actual", agent_ids, dim)
        if kind == 2:
            return _var(rng, "desired", agent_ids, dim)
        if kind == 3:
            return _var(rng, "omega", agent_ids, dim)
        from swarmdeform.ltl import BinOp

        op = ("+", "-", "*")[rng.integers(0, 3)]
        return BinOp(op, expr(d - 1), expr(d - 1))

    def formula(d):
        kind = rng.integers(0, 5 if d > 0 else 2)
        if kind == 0:
            return TRUE
        if kind == 1:
            return Leq(expr(min(d, 2)), expr(min(d, 2)))
        if kind == 2:
            return Not(formula(d - 1))
        if kind == 3:
            return Or(formula(d - 1), formula(d - 1))
        return Until(formula(d - 1), formula(d - 1))

    return formula(depth)


def _const(rng):
    from swarmdeform.ltl import Const

    return Const(float(np.round(rng.uniform(-2.0, 2.0), 3)))


def _var(rng, kind, agent_ids, dim):
    from swarmdeform.ltl import ActualVar, DesiredVar, OmegaVar

    agent = int(rng.choice(agent_ids))
    if kind == "omega":
        return OmegaVar(agent, int(rng.integers(1, dim + 2)))
    coord = int(rng.integers(1, dim + 1))
    return ActualVar(agent, coord) if kind == "actual" else DesiredVar(agent, coord)


def random_trace(rng: np.random.Generator, length: int, agent_ids=(1, 2, 3), dim: int = 2):
    """Random trace with containment channels for logic tests."""
    from swarmdeform.dynamics import Trace

    n = len(agent_ids)
    return Trace(
        times=0.5 * np.arange(length),
        positions=rng.uniform(-3, 3, (length, n, dim)),
        velocities=rng.uniform(-1, 1, (length, n, dim)),
        desired=rng.uniform(-3, 3, (length, n, dim)),
        agent_ids=tuple(agent_ids),
        omegas=rng.uniform(-1, 1, (length, n, dim + 1)),
    )


def oracle_holds(phi, trace, k: int) -> bool:
    """Literal recursive satisfaction, written directly from the definition:
    an Until holds at k iff some k' >= k satisfies the right operand with
    the left operand true at every sample from k up to (excluding) k'."""
    from swarmdeform.ltl import Leq, Not, Or, TrueFormula, Until

    if isinstance(phi, TrueFormula):
        return True
    if isinstance(phi, Leq):
        return oracle_eval(phi.left, trace, k) <= oracle_eval(phi.right, trace, k)
    if isinstance(phi, Not):
        return not oracle_holds(phi.operand, trace, k)
    if isinstance(phi, Or):
        return oracle_holds(phi.left, trace, k) or oracle_holds(phi.right, trace, k)
    if isinstance(phi, Until):
        for k2 in range(k, trace.n_samples):
            if oracle_holds(phi.right, trace, k2) and all(
                oracle_holds(phi.left, trace, k3) for k3 in range(k, k2)
            ):
                return True
        return False
    raise TypeError(phi)


def oracle_eval(expr, trace, k: int) -> float:
    from swarmdeform.ltl import ActualVar, BinOp, Const, DesiredVar, OmegaVar

    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, ActualVar):
        return float(trace.positions[k, trace.row_of(expr.agent), expr.coord - 1])
    if isinstance(expr, DesiredVar):
        return float(trace.desired[k, trace.row_of(expr.agent), expr.coord - 1])
    if isinstance(expr, OmegaVar):
        return float(trace.omegas[k, trace.row_of(expr.agent), expr.vertex - 1])
    if isinstance(expr, BinOp):
        a = oracle_eval(expr.left, trace, k)
        b = oracle_eval(expr.right, trace, k)
        return {"+": a + b, "-": a - b, "*": a * b}[expr.op]
    raise TypeError(expr)
