"""Second-order forward-mode numbers.

A :class:`HyperDual` carries a value, two directional first derivatives and
the mixed second derivative along the same pair of directions.  Arithmetic
propagates all four slots through the product, quotient and chain rules, so
evaluating a coordinate expression on seeded hyper-dual inputs returns exact
(to roundoff) first and second partial derivatives — no truncation error and
no expression swell.

Elementary functions are provided as module-level callables (``sin``, ``sec``,
``exp``, ...) that accept both plain floats and hyper-duals, which lets the
expression evaluator stay generic over the scalar type.
"""

from __future__ import annotations

import math

from .errors import EvaluationDomainError


class HyperDual:
    """Number of the form v + a·e1 + b·e2 + c·e1e2 with e1² = e2² = 0."""

    __slots__ = ("value", "d1", "d2", "d12")

    def __init__(self, value: float, d1: float = 0.0, d2: float = 0.0, d12: float = 0.0):
        self.value = float(value)
        self.d1 = float(d1)
        self.d2 = float(d2)
        self.d12 = float(d12)

    def __repr__(self) -> str:
        return f"HyperDual({self.value!r}, {self.d1!r}, {self.d2!r}, {self.d12!r})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        o = _lift(other)
        return HyperDual(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d12 + o.d12)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        return HyperDual(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2, self.d12 - o.d12)

    def __rsub__(self, other):
        return _lift(other).__sub__(self)

    def __mul__(self, other):
        o = _lift(other)
        return HyperDual(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + self.value * o.d2,
            self.d12 * o.value + self.d1 * o.d2 + self.d2 * o.d1 + self.value * o.d12,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o.value == 0.0:
            raise EvaluationDomainError("division by zero")
        return self * _chain(o, 1.0 / o.value, -1.0 / o.value**2, 2.0 / o.value**3)

    def __rtruediv__(self, other):
        return _lift(other).__truediv__(self)

    def __neg__(self):
        return HyperDual(-self.value, -self.d1, -self.d2, -self.d12)

    def __pow__(self, exponent):
        return power(self, exponent)


def _lift(x) -> HyperDual:
    if isinstance(x, HyperDual):
        return x
    return HyperDual(float(x))


def _chain(u: HyperDual, f0: float, f1: float, f2: float) -> HyperDual:
    """Compose a scalar function (value f0, derivatives f1, f2 at u.value)."""
    return HyperDual(
        f0,
        f1 * u.d1,
        f1 * u.d2,
        f1 * u.d12 + f2 * u.d1 * u.d2,
    )


def seed(point, dir1: int, dir2: int) -> list[HyperDual]:
    """Hyper-dual inputs for the partials along coordinates dir1 and dir2."""
    return [
        HyperDual(float(v), 1.0 if k == dir1 else 0.0, 1.0 if k == dir2 else 0.0, 0.0)
        for k, v in enumerate(point)
    ]


# -- elementary functions, generic over float / HyperDual -------------------


def power(x, exponent):
    """x ** exponent for a real (rational) exponent with domain checks."""
    r = float(exponent)
    integral = r == int(r)
    if not isinstance(x, HyperDual):
        return _float_pow(float(x), r, integral)
    v = x.value
    f0 = _float_pow(v, r, integral)
    if r == 0.0:
        return _chain(x, f0, 0.0, 0.0)
    f1 = r * _float_pow(v, r - 1.0, integral)
    f2 = r * (r - 1.0) * _float_pow(v, r - 2.0, integral)
    return _chain(x, f0, f1, f2)


def _float_pow(v: float, r: float, integral: bool) -> float:
    if v == 0.0 and r < 0.0:
        raise EvaluationDomainError("zero raised to a negative power")
    if v < 0.0 and not integral:
        raise EvaluationDomainError(
            f"negative base {v!r} with non-integer exponent {r!r}"
        )
    return math.pow(v, r) if v >= 0.0 else math.copysign(math.pow(-v, r), (-1.0) ** int(r))


def sin(x):
    if not isinstance(x, HyperDual):
        return math.sin(x)
    s, c = math.sin(x.value), math.cos(x.value)
    return _chain(x, s, c, -s)


def cos(x):
    if not isinstance(x, HyperDual):
        return math.cos(x)
    s, c = math.sin(x.value), math.cos(x.value)
    return _chain(x, c, -s, -c)


def tan(x):
    if not isinstance(x, HyperDual):
        _check_cos(x)
        return math.tan(x)
    _check_cos(x.value)
    t = math.tan(x.value)
    d = 1.0 + t * t
    return _chain(x, t, d, 2.0 * t * d)


def sec(x):
    if not isinstance(x, HyperDual):
        _check_cos(x)
        return 1.0 / math.cos(x)
    _check_cos(x.value)
    s = 1.0 / math.cos(x.value)
    t = math.tan(x.value)
    return _chain(x, s, s * t, s * (t * t + s * s))


def _check_cos(v: float) -> None:
    # float pi/2 has cos ~ 6e-17; anything that close to a pole is a domain hit
    if abs(math.cos(v)) < 1e-15:
        raise EvaluationDomainError(f"sec/tan undefined at {v!r} (cos vanishes)")


def sinh(x):
    if not isinstance(x, HyperDual):
        return math.sinh(x)
    s, c = math.sinh(x.value), math.cosh(x.value)
    return _chain(x, s, c, s)


def cosh(x):
    if not isinstance(x, HyperDual):
        return math.cosh(x)
    s, c = math.sinh(x.value), math.cosh(x.value)
    return _chain(x, c, s, c)


def exp(x):
    if not isinstance(x, HyperDual):
        return math.exp(x)
    e = math.exp(x.value)
    return _chain(x, e, e, e)


def ln(x):
    if not isinstance(x, HyperDual):
        if x <= 0.0:
            raise EvaluationDomainError(f"log of non-positive value {x!r}")
        return math.log(x)
    v = x.value
    if v <= 0.0:
        raise EvaluationDomainError(f"log of non-positive value {v!r}")
    return _chain(x, math.log(v), 1.0 / v, -1.0 / v**2)


def sqrt(x):
    if not isinstance(x, HyperDual):
        if x < 0.0:
            raise EvaluationDomainError(f"sqrt of negative value {x!r}")
        return math.sqrt(x)
    v = x.value
    if v < 0.0:
        raise EvaluationDomainError(f"sqrt of negative value {v!r}")
    if v == 0.0:
        raise EvaluationDomainError("sqrt not differentiable at 0")
    r = math.sqrt(v)
    return _chain(x, r, 0.5 / r, -0.25 / (r * v))


def absval(x):
    if not isinstance(x, HyperDual):
        return abs(x)
    if x.value == 0.0:
        raise EvaluationDomainError("abs not differentiable at 0")
    s = math.copysign(1.0, x.value)
    return _chain(x, abs(x.value), s, 0.0)


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sec": sec,
    "sinh": sinh,
    "cosh": cosh,
    "exp": exp,
    "ln": ln,
    "sqrt": sqrt,
    "abs": absval,
}
