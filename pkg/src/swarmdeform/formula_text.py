"""Concrete text syntax for monitor formulas.

Grammar (loosest to tightest binding):

    formula  ::=  formula 'U' formula          right-associative
               |  formula '|' formula
               |  formula '&' formula
               |  '!' formula | 'G' formula | 'F' formula
               |  'true' | expr '<=' expr | '(' formula ')'
    expr     ::=  expr ('+'|'-') expr
               |  expr ('*'|'/') expr
               |  '-' expr | number | var | '(' expr ')'
    var      ::=  'r[' int '][' int ']' | 'rht[' int '][' int ']'
               |  'omega[' int '][' int ']'

Comparisons bind tighter than '!', which binds tighter than '&', '|' and
'U'.  'G' and 'F' normalize to the core operators on parsing.  Printing a
formula and re-parsing the text reproduces the identical structure.
"""

from __future__ import annotations

import re
from typing import Optional

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
    Or,
    TRUE,
    TrueFormula,
    Until,
    always,
    eventually,
)


class FormulaSyntaxError(ValueError):
    """Parse failure with the offending position in the source text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<symbol><=|[()\[\]+\-*/!&|]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise FormulaSyntaxError(f"unexpected character {stripped[0]!r}", at)
        if m.lastgroup == "number":
            tokens.append(("number", m.group("number"), m.start("number")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("symbol", m.group("symbol"), m.start("symbol")))
        pos = m.end()
    return tokens


class _Failure(Exception):
    pass


class _Parser:
    """Recursive descent with backtracking over the '(' ambiguity.

    A '(' may open either a parenthesized expression (inside a comparison)
    or a parenthesized formula; the parser tries the comparison reading
    first and rewinds on failure.  The deepest failure position is kept so
    error messages point at where parsing actually got stuck.
    """

    def __init__(self, text: str, agent_ids=None, dimension: Optional[int] = None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.agent_ids = None if agent_ids is None else set(agent_ids)
        self.dimension = dimension
        self.furthest = (0, "syntax error")

    def _here(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][2]
        return len(self.text)

    def _fail(self, message: str):
        at = self._here()
        if at >= self.furthest[0]:
            if self.pos >= len(self.tokens):
                message += " (end of input)"
            self.furthest = (at, message)
        raise _Failure()

    def _peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self, kind: str, value: Optional[str] = None) -> str:
        tok = self._peek()
        if tok is None or tok[0] != kind or (value is not None and tok[1] != value):
            expected = value if value is not None else kind
            self._fail(f"expected {expected!r}")
        self.pos += 1
        return tok[1]

    def _accept(self, kind: str, value: str) -> bool:
        tok = self._peek()
        if tok is not None and tok[0] == kind and tok[1] == value:
            self.pos += 1
            return True
        return False

    # -- formulas -----------------------------------------------------

    def formula(self) -> Formula:
        left = self.disjunction()
        if self._accept("name", "U"):
            right = self.formula()  # right-associative
            return Until(left, right)
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self._accept("symbol", "|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self._accept("symbol", "&"):
            right = self.unary()
            left = Not(Or(Not(left), Not(right)))
        return left

    def unary(self) -> Formula:
        if self._accept("symbol", "!"):
            return Not(self.unary())
        if self._accept("name", "G"):
            return always(self.unary())
        if self._accept("name", "F"):
            return eventually(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self._peek()
        if tok is None:
            self._fail("expected a formula")
        if tok[0] == "name" and tok[1] == "true":
            self.pos += 1
            return TRUE
        # Comparison reading first; rewind to try a parenthesized formula.
        mark = self.pos
        try:
            left = self.expr()
            self._take("symbol", "<=")
            right = self.expr()
            return Leq(left, right)
        except _Failure:
            self.pos = mark
        if self._accept("symbol", "("):
            inner = self.formula()
            self._take("symbol", ")")
            return inner
        self._fail("expected a formula")

    # -- expressions --------------------------------------------------

    def expr(self) -> Expr:
        left = self.term()
        while True:
            if self._accept("symbol", "+"):
                left = BinOp("+", left, self.term())
            elif self._accept("symbol", "-"):
                left = BinOp("-", left, self.term())
            else:
                return left

    def term(self) -> Expr:
        left = self.factor()
        while True:
            if self._accept("symbol", "*"):
                left = BinOp("*", left, self.factor())
            elif self._accept("symbol", "/"):
                left = BinOp("/", left, self.factor())
            else:
                return left

    def factor(self) -> Expr:
        if self._accept("symbol", "-"):
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return BinOp("-", Const(0.0), inner)
        tok = self._peek()
        if tok is None:
            self._fail("expected an expression")
        if tok[0] == "number":
            self.pos += 1
            return Const(float(tok[1]))
        if tok[0] == "name" and tok[1] in ("r", "rht", "omega"):
            self.pos += 1
            first = self._index()
            second = self._index()
            return self._make_var(tok[1], first, second, tok[2])
        if self._accept("symbol", "("):
            inner = self.expr()
            self._take("symbol", ")")
            return inner
        self._fail("expected an expression")

    def _index(self) -> int:
        self._take("symbol", "[")
        tok = self._peek()
        if tok is None or tok[0] != "number" or not re.fullmatch(r"\d+", tok[1]):
            self._fail("expected an integer index")
        self.pos += 1
        self._take("symbol", "]")
        return int(tok[1])

    def _make_var(self, name: str, agent: int, second: int, at: int) -> Expr:
        if self.agent_ids is not None and agent not in self.agent_ids:
            raise FormulaSyntaxError(f"unknown agent id {agent}", at)
        if name == "omega":
            if second < 1 or (self.dimension is not None and second > self.dimension + 1):
                raise FormulaSyntaxError(f"vertex index {second} out of range", at)
            return OmegaVar(agent, second)
        if second < 1 or (self.dimension is not None and second > self.dimension):
            raise FormulaSyntaxError(f"coordinate index {second} out of range", at)
        if agent < 1:
            raise FormulaSyntaxError(f"agent index {agent} out of range", at)
        return ActualVar(agent, second) if name == "r" else DesiredVar(agent, second)


def parse_formula(text: str, agent_ids=None, dimension: Optional[int] = None) -> Formula:
    """Parse formula text; see the module docstring for the grammar.

    agent_ids and dimension, when given, bound the variable indices.

    Raises
    ------
    FormulaSyntaxError
        With the position of the failure.
    """
    parser = _Parser(text, agent_ids, dimension)
    try:
        out = parser.formula()
    except _Failure:
        raise FormulaSyntaxError(parser.furthest[1], parser.furthest[0]) from None
    if parser.pos != len(parser.tokens):
        raise FormulaSyntaxError("unexpected trailing input", parser._here())
    return out


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

# Formula binding levels, loosest to tightest.
_LVL_UNTIL = 1
_LVL_OR = 2
_LVL_AND = 3
_LVL_UNARY = 4
_LVL_ATOM = 5


def _fmt_formula(phi: Formula, minimum: int) -> str:
    # Sugar first: And, Always, Eventually are printed back in their
    # derived forms so round-trips reproduce the identical structure.
    if isinstance(phi, Not):
        inner = phi.operand
        if (
            isinstance(inner, Or)
            and isinstance(inner.left, Not)
            and isinstance(inner.right, Not)
        ):
            text = (
                _fmt_formula(inner.left.operand, _LVL_AND)
                + " & "
                + _fmt_formula(inner.right.operand, _LVL_AND + 1)
            )
            return f"({text})" if _LVL_AND < minimum else text
        if isinstance(inner, Until) and inner.left == TRUE and isinstance(inner.right, Not):
            text = "G " + _fmt_formula(inner.right.operand, _LVL_UNARY)
            return f"({text})" if _LVL_UNARY < minimum else text
        text = "!" + _fmt_formula(phi.operand, _LVL_UNARY)
        return f"({text})" if _LVL_UNARY < minimum else text
    if isinstance(phi, TrueFormula):
        return "true"
    if isinstance(phi, Leq):
        text = _fmt_expr(phi.left, 1) + " <= " + _fmt_expr(phi.right, 1)
        return f"({text})" if _LVL_ATOM < minimum else text
    if isinstance(phi, Or):
        text = _fmt_formula(phi.left, _LVL_OR) + " | " + _fmt_formula(phi.right, _LVL_OR + 1)
        return f"({text})" if _LVL_OR < minimum else text
    if isinstance(phi, Until):
        if phi.left == TRUE:
            text = "F " + _fmt_formula(phi.right, _LVL_UNARY)
            return f"({text})" if _LVL_UNARY < minimum else text
        text = (
            _fmt_formula(phi.left, _LVL_UNTIL + 1)
            + " U "
            + _fmt_formula(phi.right, _LVL_UNTIL)
        )
        return f"({text})" if _LVL_UNTIL < minimum else text
    raise TypeError(f"not a formula: {phi!r}")


def _fmt_expr(expr: Expr, minimum: int) -> str:
    if isinstance(expr, Const):
        return repr(float(expr.value))
    if isinstance(expr, ActualVar):
        return f"r[{expr.agent}][{expr.coord}]"
    if isinstance(expr, DesiredVar):
        return f"rht[{expr.agent}][{expr.coord}]"
    if isinstance(expr, OmegaVar):
        return f"omega[{expr.agent}][{expr.vertex}]"
    if isinstance(expr, BinOp):
        level = 1 if expr.op in "+-" else 2
        text = (
            _fmt_expr(expr.left, level)
            + f" {expr.op} "
            + _fmt_expr(expr.right, level + 1)
        )
        return f"({text})" if level < minimum else text
    raise TypeError(f"not an expression: {expr!r}")


def formula_to_text(phi: Formula) -> str:
    """Render a formula in the concrete grammar; inverse of parse_formula."""
    return _fmt_formula(phi, _LVL_UNTIL)
