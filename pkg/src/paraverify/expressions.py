"""Expression trees for smooth coordinate functions.

A :class:`ScalarExpr` is an immutable tree over chart coordinates built from
constants, coordinates, sums, products, quotients, rational powers, negation
and a fixed set of elementary functions.  Trees evaluate over any scalar type
that supports arithmetic — plain floats for values, :class:`~.hyperdual.HyperDual`
for exact first/second partial derivatives.

The text grammar (parsed by :func:`parse_expression`)::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' rational)?
    base     := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
    func     := sin | cos | tan | sec | sinh | cosh | exp | ln | sqrt | abs
    rational := ['-'] number ['/' number]   (parentheses allowed)

``pi`` is a built-in constant.  Printing emits fully parenthesised text that
re-parses to an expression with identical values everywhere; no simplification
is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import hyperdual as hd
from .errors import ExpressionSyntaxError, UnknownIdentifierError

FUNCTION_NAMES = tuple(sorted(hd.FUNCTIONS))


class ScalarExpr:
    """Base node.  Subclasses implement ``evaluate`` and ``to_text``."""

    def evaluate(self, values):
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()

    # operator sugar, used when assembling expressions programmatically
    def __add__(self, other):
        return Sum(self, as_expr(other))

    def __radd__(self, other):
        return Sum(as_expr(other), self)

    def __sub__(self, other):
        return Sum(self, Negate(as_expr(other)))

    def __rsub__(self, other):
        return Sum(as_expr(other), Negate(self))

    def __mul__(self, other):
        return Product(self, as_expr(other))

    def __rmul__(self, other):
        return Product(as_expr(other), self)

    def __truediv__(self, other):
        return Quotient(self, as_expr(other))

    def __rtruediv__(self, other):
        return Quotient(as_expr(other), self)

    def __neg__(self):
        return Negate(self)

    def __pow__(self, exponent):
        return Power(self, Fraction(exponent))


@dataclass(frozen=True)
class Constant(ScalarExpr):
    value: float

    def evaluate(self, values):
        return self.value

    def to_text(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class Coordinate(ScalarExpr):
    index: int
    name: str

    def evaluate(self, values):
        return values[self.index]

    def to_text(self) -> str:
        return self.name


@dataclass(frozen=True)
class Sum(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr

    def evaluate(self, values):
        return self.left.evaluate(values) + self.right.evaluate(values)

    def to_text(self) -> str:
        return f"({self.left.to_text()} + {self.right.to_text()})"


@dataclass(frozen=True)
class Product(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr

    def evaluate(self, values):
        return self.left.evaluate(values) * self.right.evaluate(values)

    def to_text(self) -> str:
        return f"({self.left.to_text()} * {self.right.to_text()})"


@dataclass(frozen=True)
class Quotient(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr

    def evaluate(self, values):
        num = self.left.evaluate(values)
        den = self.right.evaluate(values)
        return num / den if isinstance(den, hd.HyperDual) or isinstance(num, hd.HyperDual) else _float_div(num, den)

    def to_text(self) -> str:
        return f"({self.left.to_text()} / {self.right.to_text()})"


def _float_div(num: float, den: float) -> float:
    if den == 0.0:
        from .errors import EvaluationDomainError

        raise EvaluationDomainError("division by zero")
    return num / den


@dataclass(frozen=True)
class Power(ScalarExpr):
    base: ScalarExpr
    exponent: Fraction

    def evaluate(self, values):
        return hd.power(self.base.evaluate(values), float(self.exponent))

    def to_text(self) -> str:
        e = self.exponent
        if e.denominator == 1:
            etext = str(e.numerator) if e.numerator >= 0 else f"({e.numerator})"
        else:
            etext = f"({e.numerator}/{e.denominator})"
        return f"({self.base.to_text()} ^ {etext})"


@dataclass(frozen=True)
class Negate(ScalarExpr):
    child: ScalarExpr

    def evaluate(self, values):
        return -self.child.evaluate(values)

    def to_text(self) -> str:
        return f"(-{self.child.to_text()})"


@dataclass(frozen=True)
class Call(ScalarExpr):
    func: str
    arg: ScalarExpr

    def evaluate(self, values):
        return hd.FUNCTIONS[self.func](self.arg.evaluate(values))

    def to_text(self) -> str:
        return f"{self.func}({self.arg.to_text()})"


ZERO = Constant(0.0)
ONE = Constant(1.0)


def as_expr(x) -> ScalarExpr:
    if isinstance(x, ScalarExpr):
        return x
    return Constant(float(x))


def shift_coordinates(expr: ScalarExpr, offset: int) -> ScalarExpr:
    """Reindex every coordinate node by ``offset`` (lifting onto a product chart)."""
    if isinstance(expr, Coordinate):
        return Coordinate(expr.index + offset, expr.name)
    if isinstance(expr, (Constant,)):
        return expr
    if isinstance(expr, (Sum, Product, Quotient)):
        return type(expr)(shift_coordinates(expr.left, offset), shift_coordinates(expr.right, offset))
    if isinstance(expr, Power):
        return Power(shift_coordinates(expr.base, offset), expr.exponent)
    if isinstance(expr, Negate):
        return Negate(shift_coordinates(expr.child, offset))
    if isinstance(expr, Call):
        return Call(expr.func, shift_coordinates(expr.arg, offset))
    raise TypeError(f"unknown expression node {type(expr).__name__}")


# -- parsing -----------------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(f"{message} at position {self.pos} in {self.text!r}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def accept(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.accept(ch):
            raise self.error(f"expected {ch!r}")

    def number(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
            self.pos += 1
        out = self.text[start:self.pos]
        if not out or out.count(".") > 1 or out == ".":
            raise self.error("expected a number")
        return out

    def identifier(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


class _Parser:
    def __init__(self, text: str, coords: Sequence[str]):
        self.tok = _Tokenizer(text)
        self.coords = {name: i for i, name in enumerate(coords)}

    def parse(self) -> ScalarExpr:
        expr = self.expr()
        self.tok.skip_ws()
        if self.tok.pos != len(self.tok.text):
            raise self.tok.error("unexpected trailing input")
        return expr

    def expr(self) -> ScalarExpr:
        node = self.term()
        while True:
            if self.tok.accept("+"):
                node = Sum(node, self.term())
            elif self.tok.accept("-"):
                node = Sum(node, Negate(self.term()))
            else:
                return node

    def term(self) -> ScalarExpr:
        node = self.factor()
        while True:
            if self.tok.accept("*"):
                node = Product(node, self.factor())
            elif self.tok.accept("/"):
                node = Quotient(node, self.factor())
            else:
                return node

    def factor(self) -> ScalarExpr:
        node = self.base()
        if self.tok.accept("^"):
            node = Power(node, self.rational())
        return node

    def rational(self) -> Fraction:
        parenthesised = self.tok.accept("(")
        sign = -1 if self.tok.accept("-") else 1
        num = self.tok.number()
        if "." in num:
            value = Fraction(num).limit_denominator(10**9) * sign
        else:
            value = Fraction(sign * int(num))
        if self.tok.accept("/"):
            den = self.tok.number()
            if "." in den:
                raise self.tok.error("exponent denominator must be an integer")
            value = value / int(den)
        if parenthesised:
            self.tok.expect(")")
        return value

    def base(self) -> ScalarExpr:
        ch = self.tok.peek()
        if ch == "":
            raise self.tok.error("unexpected end of input")
        if ch == "-":
            self.tok.take()
            return Negate(self.base())
        if ch == "(":
            self.tok.take()
            node = self.expr()
            self.tok.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return Constant(float(self.tok.number()))
        if ch.isalpha() or ch == "_":
            name = self.tok.identifier()
            if name in hd.FUNCTIONS:
                self.tok.expect("(")
                arg = self.expr()
                self.tok.expect(")")
                return Call(name, arg)
            if name == "pi":
                return Constant(math.pi)
            if name in self.coords:
                return Coordinate(self.coords[name], name)
            known = ", ".join(self.coords) or "<none>"
            raise UnknownIdentifierError(
                f"unknown identifier {name!r}; chart coordinates are {known}"
            )
        raise self.tok.error(f"unexpected character {ch!r}")


def parse_expression(text: str, chart) -> ScalarExpr:
    """Parse infix text against a chart (anything with a ``coords`` attribute)
    or a plain sequence of coordinate names."""
    coords = getattr(chart, "coords", chart)
    return _Parser(text, tuple(coords)).parse()


# -- hyper-dual evaluation helpers -------------------------------------------

Pointlike = Sequence[float]


def eval_value(expr: ScalarExpr, point: Pointlike) -> float:
    return float(expr.evaluate([float(v) for v in point]))


def eval_hyperdual(expr: ScalarExpr, point: Pointlike, dir1: int, dir2: int) -> hd.HyperDual:
    """Value, the two first partials along dir1/dir2, and the mixed second partial."""
    out = expr.evaluate(hd.seed(point, dir1, dir2))
    if not isinstance(out, hd.HyperDual):
        out = hd.HyperDual(float(out))
    return out


def partial(expr: ScalarExpr, point: Pointlike, direction: int) -> float:
    return eval_hyperdual(expr, point, direction, direction).d1


def second_partial(expr: ScalarExpr, point: Pointlike, dir1: int, dir2: int) -> float:
    return eval_hyperdual(expr, point, dir1, dir2).d12


def gradient(expr: ScalarExpr, point: Pointlike) -> list[float]:
    """All first partials, pairing directions so each evaluation yields two."""
    dim = len(point)
    out = [0.0] * dim
    for i in range(0, dim, 2):
        j = i + 1 if i + 1 < dim else i
        res = eval_hyperdual(expr, point, i, j)
        out[i] = res.d1
        if j != i:
            out[j] = res.d2
    return out
