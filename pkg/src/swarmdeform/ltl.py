"""Finite-trace temporal logic over recorded agent trajectories.

Formulas are built from arithmetic comparisons between expressions over
trace quantities (actual positions, desired positions, containment
channels) combined with negation, disjunction and the Until operator.
Conjunction, Always and Eventually are derived forms that normalize to the
core operators, so the evaluator only ever sees four formula shapes plus
the atomic comparison.

Semantics are over the finite remaining suffix of the trace: "always"
means at every remaining sample, "eventually" means at some remaining
sample.  Evaluation is vectorized over samples; an unsatisfied verdict
carries a witness locating the first falsifying atomic comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

# Divisors smaller than this in magnitude are treated as division by zero.
DIV_TOL = 1e-300


class ExprError(ValueError):
    """Expression evaluation failure (unknown variable, division by zero)."""


# ---------------------------------------------------------------------------
# Abstract syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class ActualVar:
    """Recorded position component r[agent][coord], both indices 1-based."""

    agent: int
    coord: int


@dataclass(frozen=True)
class DesiredVar:
    """Desired position component rht[agent][coord]."""

    agent: int
    coord: int


@dataclass(frozen=True)
class OmegaVar:
    """Containment channel omega[agent][vertex]: barycentric coordinate of
    the agent's actual position in the moving desired leader simplex."""

    agent: int
    vertex: int


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in ("+", "-", "*", "/"):
            raise ValueError(f"unknown operator {self.op!r}")


Expr = Union[Const, ActualVar, DesiredVar, OmegaVar, BinOp]


@dataclass(frozen=True)
class TrueFormula:
    pass


@dataclass(frozen=True)
class Leq:
    """Atomic comparison left <= right."""

    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


Formula = Union[TrueFormula, Leq, Not, Or, Until]

TRUE = TrueFormula()


def false_() -> Formula:
    return Not(TRUE)


def and_(a: Formula, b: Formula) -> Formula:
    """Conjunction via De Morgan: a and b = not (not a or not b)."""
    return Not(Or(Not(a), Not(b)))


def eventually(phi: Formula) -> Formula:
    return Until(TRUE, phi)


def always(phi: Formula) -> Formula:
    return Not(eventually(Not(phi)))


def conj(formulas) -> Formula:
    """Right-folded conjunction of a sequence; empty yields True."""
    items = list(formulas)
    if not items:
        return TRUE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = and_(f, out)
    return out


def disj(formulas) -> Formula:
    """Right-folded disjunction of a sequence; empty yields False."""
    items = list(formulas)
    if not items:
        return false_()
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


# ---------------------------------------------------------------------------
# Expression evaluation
# ---------------------------------------------------------------------------


def eval_expr(expr: Expr, sample) -> float:
    """Evaluate an expression at one trace sample.

    The sample must provide actual(agent, coord), desired(agent, coord) and
    omega(agent, vertex) lookups, all 1-based.
    """
    if isinstance(expr, Const):
        return float(expr.value)
    try:
        if isinstance(expr, ActualVar):
            return sample.actual(expr.agent, expr.coord)
        if isinstance(expr, DesiredVar):
            return sample.desired(expr.agent, expr.coord)
        if isinstance(expr, OmegaVar):
            return sample.omega(expr.agent, expr.vertex)
    except (KeyError, IndexError, ValueError) as exc:
        raise ExprError(f"unknown variable {expr}: {exc}") from exc
    if isinstance(expr, BinOp):
        a = eval_expr(expr.left, sample)
        b = eval_expr(expr.right, sample)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if abs(b) < DIV_TOL:
            raise ExprError("division by zero")
        return a / b
    raise ExprError(f"not an expression: {expr!r}")


def eval_expr_series(expr: Expr, trace) -> np.ndarray:
    """Evaluate an expression at every sample of a trace at once."""
    n = trace.n_samples
    if isinstance(expr, Const):
        return np.full(n, float(expr.value))
    try:
        if isinstance(expr, ActualVar):
            return np.array(trace.positions[:, trace.row_of(expr.agent), expr.coord - 1])
        if isinstance(expr, DesiredVar):
            return np.array(trace.desired[:, trace.row_of(expr.agent), expr.coord - 1])
        if isinstance(expr, OmegaVar):
            if trace.omegas is None:
                raise ExprError("trace has no containment channels")
            return np.array(trace.omegas[:, trace.row_of(expr.agent), expr.vertex - 1])
    except (KeyError, IndexError) as exc:
        raise ExprError(f"unknown variable {expr}: {exc}") from exc
    if isinstance(expr, BinOp):
        a = eval_expr_series(expr.left, trace)
        b = eval_expr_series(expr.right, trace)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        bad = np.abs(b) < DIV_TOL
        if bad.any():
            raise ExprError(f"division by zero at sample {int(np.argmax(bad))}")
        return a / b
    raise ExprError(f"not an expression: {expr!r}")


# ---------------------------------------------------------------------------
# Satisfaction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """Falsifying atomic comparison at a specific sample."""

    sample: int
    time: float
    atom: Formula
    lhs: float
    rhs: float


@dataclass(frozen=True)
class Verdict:
    satisfied: bool
    witness: Optional[Witness] = None


class _Evaluator:
    """Bottom-up vectorized evaluation with per-subformula memoization."""

    def __init__(self, trace):
        self.trace = trace
        self._sat: dict[Formula, np.ndarray] = {}
        self._series: dict[Expr, np.ndarray] = {}

    def series(self, expr: Expr) -> np.ndarray:
        out = self._series.get(expr)
        if out is None:
            out = eval_expr_series(expr, self.trace)
            self._series[expr] = out
        return out

    def sat(self, phi: Formula) -> np.ndarray:
        out = self._sat.get(phi)
        if out is not None:
            return out
        n = self.trace.n_samples
        if isinstance(phi, TrueFormula):
            out = np.ones(n, dtype=bool)
        elif isinstance(phi, Leq):
            out = self.series(phi.left) <= self.series(phi.right)
        elif isinstance(phi, Not):
            out = ~self.sat(phi.operand)
        elif isinstance(phi, Or):
            out = self.sat(phi.left) | self.sat(phi.right)
        elif isinstance(phi, Until):
            a = self.sat(phi.left)
            b = self.sat(phi.right)
            # phi1 U phi2 holds at k iff the first sample where phi2 holds,
            # at or after k, arrives no later than the first sample where
            # phi1 fails.  Suffix scans give both frontiers in O(n).
            idx = np.arange(n)
            first_b = np.minimum.accumulate(np.where(b, idx, 2 * n)[::-1])[::-1]
            first_not_a = np.minimum.accumulate(np.where(~a, idx, n)[::-1])[::-1]
            out = first_b <= first_not_a
        else:
            raise TypeError(f"not a formula: {phi!r}")
        self._sat[phi] = out
        return out

    def explain(self, phi: Formula, k: int, value: bool) -> Optional[Witness]:
        """Locate an atomic comparison responsible for phi having truth `value` at k."""
        if isinstance(phi, TrueFormula):
            return None
        if isinstance(phi, Leq):
            return Witness(
                sample=k,
                time=float(self.trace.times[k]),
                atom=phi,
                lhs=float(self.series(phi.left)[k]),
                rhs=float(self.series(phi.right)[k]),
            )
        if isinstance(phi, Not):
            return self.explain(phi.operand, k, not value)
        if isinstance(phi, Or):
            if value:
                branch = phi.left if self.sat(phi.left)[k] else phi.right
                return self.explain(branch, k, True)
            return self.explain(phi.left, k, False) or self.explain(phi.right, k, False)
        if isinstance(phi, Until):
            a = self.sat(phi.left)
            b = self.sat(phi.right)
            n = self.trace.n_samples
            if value:
                # Walk to the earliest sample establishing the Until.
                j = k
                while j < n:
                    if b[j]:
                        return self.explain(phi.right, j, True)
                    if not a[j]:  # pragma: no cover - unreachable when value holds
                        return None
                    j += 1
                return None
            # Falsity: blocked where the left operand first fails (the right
            # operand is false everywhere up to there), or never established.
            j = k
            while j < n:
                if not a[j]:
                    return self.explain(phi.right, j, False) or self.explain(phi.left, j, False)
                j += 1
            return self.explain(phi.right, n - 1, False)
        raise TypeError(f"not a formula: {phi!r}")


def satisfies(phi: Formula, trace, k: int = 0) -> Verdict:
    """Decide whether a formula holds at sample k of a trace.

    Returns a Verdict; when unsatisfied, the witness points at the first
    falsifying atomic comparison reachable through the operator structure,
    with the concrete values of both sides.

    Raises
    ------
    IndexError
        If k is outside the trace.
    ExprError
        On expression failures, with the offending sample in the message.
    """
    if not 0 <= k < trace.n_samples:
        raise IndexError(f"sample {k} out of range [0, {trace.n_samples})")
    ev = _Evaluator(trace)
    ok = bool(ev.sat(phi)[k])
    if ok:
        return Verdict(True, None)
    return Verdict(False, ev.explain(phi, k, False))
