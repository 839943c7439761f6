"""Commutator expressions: a small AST over free-group generators.

Expressions are built from generators, formal inverses, commutators [u, v],
and products.  They evaluate to free-group words via [u, v] = u v u^-1 v^-1,
and each expression has a weight: the bracket depth that lower-bounds where
its value sits in the lower central series.

The concrete syntax, shared by words and expressions:

    expr    := factor (('*' | ' ') factor)*
    factor  := atom ('^' nonzero-int)?
    atom    := 'x' digits | '[' expr ',' expr ']' | '(' expr ')'

so "x1*x2^-1", "[x1, x2]" and "[[x1,x2],x2]^-1" all parse.  Words use the
same grammar minus brackets and parentheses, plus the atom '1' for the
identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ParseError, ValidationError
from .words import IDENTITY, GroupWord, generator

CommutatorExpr = Union["Gen", "Inv", "Comm", "Prod"]


@dataclass(frozen=True, slots=True)
class Gen:
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValidationError(f"generator index must be >= 1, got {self.index}")


@dataclass(frozen=True, slots=True)
class Inv:
    operand: CommutatorExpr


@dataclass(frozen=True, slots=True)
class Comm:
    left: CommutatorExpr
    right: CommutatorExpr


@dataclass(frozen=True, slots=True)
class Prod:
    factors: tuple[CommutatorExpr, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValidationError("empty product; use Gen or the identity word instead")


def weight(expr: CommutatorExpr) -> int:
    """Bracket weight: 1 on generators, additive under Comm, min under Prod."""
    if isinstance(expr, Gen):
        return 1
    if isinstance(expr, Inv):
        return weight(expr.operand)
    if isinstance(expr, Comm):
        return weight(expr.left) + weight(expr.right)
    if isinstance(expr, Prod):
        return min(weight(f) for f in expr.factors)
    raise ValidationError(f"not a commutator expression: {expr!r}")


def evaluate(expr: CommutatorExpr) -> GroupWord:
    """The free-group word of an expression, freely reduced."""
    if isinstance(expr, Gen):
        return generator(expr.index)
    if isinstance(expr, Inv):
        return evaluate(expr.operand).inverse()
    if isinstance(expr, Comm):
        u, v = evaluate(expr.left), evaluate(expr.right)
        return u * v * u.inverse() * v.inverse()
    if isinstance(expr, Prod):
        out = IDENTITY
        for f in expr.factors:
            out = out * evaluate(f)
        return out
    raise ValidationError(f"not a commutator expression: {expr!r}")


def generators_used(expr: CommutatorExpr) -> set[int]:
    if isinstance(expr, Gen):
        return {expr.index}
    if isinstance(expr, Inv):
        return generators_used(expr.operand)
    if isinstance(expr, Comm):
        return generators_used(expr.left) | generators_used(expr.right)
    return set().union(*(generators_used(f) for f in expr.factors))


def push_inverses(expr: CommutatorExpr) -> CommutatorExpr:
    """Rewrite so Inv only wraps generators, using [u,v]^-1 = [v,u]."""
    if isinstance(expr, Gen):
        return expr
    if isinstance(expr, Comm):
        return Comm(push_inverses(expr.left), push_inverses(expr.right))
    if isinstance(expr, Prod):
        return Prod(tuple(push_inverses(f) for f in expr.factors))
    inner = expr.operand
    if isinstance(inner, Inv):
        return push_inverses(inner.operand)
    if isinstance(inner, Comm):
        return Comm(push_inverses(inner.right), push_inverses(inner.left))
    if isinstance(inner, Prod):
        return Prod(tuple(push_inverses(Inv(f)) for f in reversed(inner.factors)))
    return expr


def expr_str(expr: CommutatorExpr) -> str:
    if isinstance(expr, Gen):
        return f"x{expr.index}"
    if isinstance(expr, Inv):
        inner = expr_str(expr.operand)
        if isinstance(expr.operand, (Gen, Comm)):
            return f"{inner}^-1"
        return f"({inner})^-1"
    if isinstance(expr, Comm):
        return f"[{expr_str(expr.left)}, {expr_str(expr.right)}]"
    return "*".join(
        f"({expr_str(f)})" if isinstance(f, Prod) else expr_str(f)
        for f in expr.factors
    )


_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<gen>x(?P<genindex>\d+))
      | (?P<one>1)
      | (?P<caret>\^(?P<exp>-?\d+))
      | (?P<lbrack>\[)
      | (?P<rbrack>\])
      | (?P<comma>,)
      | (?P<star>\*)
      | (?P<lparen>\()
      | (?P<rparen>\))
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup if m.lastgroup in ("genindex", "exp") else None
        for name in ("ws", "gen", "one", "caret", "lbrack", "rbrack", "comma", "star", "lparen", "rparen"):
            if m.group(name) is not None:
                kind = name
                break
        if kind != "ws":
            yield kind, m.group(0), pos
        pos = m.end()
    yield "end", "", len(text)


class _Parser:
    def __init__(self, text: str, allow_brackets: bool):
        self.tokens = list(_tokenize(text))
        self.allow_brackets = allow_brackets
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> tuple[str, str, int]:
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse_expr(self) -> CommutatorExpr | None:
        factors = []
        factor = self.parse_factor()
        if factor is not None:
            factors.append(factor)
        while True:
            kind = self.peek()[0]
            if kind == "star":
                self.take()
            elif kind not in ("gen", "one", "lbrack", "lparen"):
                break
            factor = self.parse_factor()
            if factor is not None:
                factors.append(factor)
        if not factors:
            return None
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def parse_factor(self) -> CommutatorExpr | None:
        atom = self.parse_atom()
        if self.peek()[0] == "caret":
            kind, text, pos = self.take()
            exp = int(text[1:])
            if exp == 0:
                raise ParseError("exponent must be nonzero", pos)
            if atom is None:
                return None
            base = atom if exp > 0 else Inv(atom)
            n = abs(exp)
            return base if n == 1 else Prod((base,) * n)
        return atom

    def parse_atom(self) -> CommutatorExpr | None:
        kind, text, pos = self.take()
        if kind == "gen":
            index = int(text[1:])
            if index < 1:
                raise ParseError("generator index must be >= 1", pos)
            return Gen(index)
        if kind == "one":
            if self.allow_brackets:
                raise ParseError("'1' denotes the identity word, not an expression", pos)
            return None
        if kind == "lbrack" and self.allow_brackets:
            left = self.require(self.parse_expr(), pos)
            self.expect("comma", "','")
            right = self.require(self.parse_expr(), pos)
            self.expect("rbrack", "']'")
            return Comm(left, right)
        if kind == "lparen" and self.allow_brackets:
            inner = self.require(self.parse_expr(), pos)
            self.expect("rparen", "')'")
            return inner
        what = "a generator, '[', or '('" if self.allow_brackets else "a generator or '1'"
        raise ParseError(f"expected {what}, found {text or 'end of input'!r}", pos)

    @staticmethod
    def require(expr: CommutatorExpr | None, pos: int) -> CommutatorExpr:
        if expr is None:
            raise ParseError("empty expression", pos)
        return expr

    def finish(self) -> None:
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos)


def parse_expression(text: str) -> CommutatorExpr:
    """Parse a commutator expression such as "[x1, x2]*x3^-1"."""
    parser = _Parser(text, allow_brackets=True)
    expr = parser.parse_expr()
    parser.finish()
    if expr is None:
        raise ParseError("empty expression", 0)
    return expr


def parse_word(text: str, rank: int | None = None) -> GroupWord:
    """Parse a plain word such as "x1*x2^-1" or "1"."""
    parser = _Parser(text, allow_brackets=False)
    expr = parser.parse_expr()
    parser.finish()
    word = IDENTITY if expr is None else evaluate(expr)
    if rank is not None and word.max_generator > rank:
        raise ParseError(f"generator x{word.max_generator} exceeds alphabet rank {rank}")
    return word


def word_str(w: GroupWord) -> str:
    """Canonical textual form: "1" for the identity, else "x1^2*x2^-1" style."""
    return str(w)
