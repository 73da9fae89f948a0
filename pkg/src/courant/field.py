"""Exact arithmetic in the rational function field Q(x1, ..., xn).

Polynomials are sparse and backed by sympy's ``PolyRing`` over ``QQ`` in
graded-lexicographic order.  :class:`RatFunc` keeps every value in a canonical
form (coprime numerator and denominator, monic denominator), so equality and
zero-testing are exact and structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

__all__ = [
    "Chart",
    "RatFunc",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "DivisionByZeroError",
    "parse_expr",
    "is_zero",
    "partial",
]

Scalar = Union[int, Fraction]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RINGS: dict[tuple[str, ...], PolyRing] = {}


def _ring_for(names: tuple[str, ...]) -> PolyRing:
    ring = _RINGS.get(names)
    if ring is None:
        ring = PolyRing(",".join(names), QQ, grlex)
        _RINGS[names] = ring
    return ring


@dataclass(frozen=True)
class Chart:
    """A global coordinate chart with named variables."""

    var_names: tuple[str, ...]
    _ring: PolyRing = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, var_names: Iterable[str]):
        names = tuple(var_names)
        if not names:
            raise ValueError("a chart needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not _IDENT.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        object.__setattr__(self, "var_names", names)
        object.__setattr__(self, "_ring", _ring_for(names))

    @property
    def dim(self) -> int:
        return len(self.var_names)

    @property
    def ring(self) -> PolyRing:
        return self._ring

    def const(self, value: Scalar) -> "RatFunc":
        return RatFunc._from_poly(self, _ground(self._ring, value))

    @property
    def zero(self) -> "RatFunc":
        return RatFunc._from_poly(self, self._ring.zero)

    @property
    def one(self) -> "RatFunc":
        return RatFunc._from_poly(self, self._ring.one)

    def var(self, i: int) -> "RatFunc":
        return RatFunc._from_poly(self, self._ring.gens[i])

    def coords(self) -> tuple["RatFunc", ...]:
        return tuple(self.var(i) for i in range(self.dim))

    def index(self, name: str) -> int:
        try:
            return self.var_names.index(name)
        except ValueError:
            raise KeyError(f"unknown chart variable {name!r}") from None

    def parse(self, text: str) -> "RatFunc":
        return parse_expr(text, self)


def _ground(ring: PolyRing, value: Scalar) -> PolyElement:
    if isinstance(value, Fraction):
        return ring.ground_new(QQ(value.numerator, value.denominator))
    if isinstance(value, int):
        return ring.ground_new(QQ(value))
    raise TypeError(f"unsupported scalar {value!r}")


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class RatFunc:
    """An element of Q(x) in canonical form."""

    __slots__ = ("chart", "num", "den")

    def __init__(self, chart: Chart, num: PolyElement, den: PolyElement):
        # Internal constructor; callers must pass canonical data.
        self.chart = chart
        self.num = num
        self.den = den

    @classmethod
    def _from_poly(cls, chart: Chart, p: PolyElement) -> "RatFunc":
        return cls(chart, p, chart.ring.one)

    @classmethod
    def from_parts(cls, chart: Chart, num: PolyElement, den: PolyElement) -> "RatFunc":
        """Build ``num/den`` and bring it to canonical form."""
        if not den:
            raise DivisionByZeroError("division by the zero polynomial")
        if not num:
            return chart.zero
        if den.is_ground:
            c = den.LC
            if c == 1:
                return cls(chart, num, den)
            return cls(chart, num.quo_ground(c), chart.ring.one)
        g, num, den = num.cofactors(den)
        c = den.LC
        if c != 1:
            num = num.quo_ground(c)
            den = den.quo_ground(c)
        return cls(chart, num, den)

    # -- coercion ---------------------------------------------------------

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.chart != self.chart:
                raise ValueError("chart mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if self.den.is_ground:
                n = self.num + other.num
                return RatFunc(self.chart, n, self.den)
            return RatFunc.from_parts(self.chart, self.num + other.num, self.den)
        g, a, b = self.den.cofactors(other.den)
        num = self.num * b + other.num * a
        return RatFunc.from_parts(self.chart, num, a * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(self.chart, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return self.chart.zero
        if self.den.is_ground and other.den.is_ground:
            return RatFunc(self.chart, self.num * other.num, self.den)
        a, b = self.num, self.den
        c, d = other.num, other.den
        if not d.is_ground:
            _, a, d = a.cofactors(d)
        if not b.is_ground:
            _, c, b = c.cofactors(b)
        return RatFunc.from_parts(self.chart, a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise DivisionByZeroError("division by the zero polynomial")
        return RatFunc.from_parts(self.chart, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponents must be nonnegative integers")
        return RatFunc(self.chart, self.num**k, self.den**k)

    # -- predicates and queries -------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return _to_fraction(self.num.LC) if self.num else Fraction(0)

    def diff(self, i: int) -> "RatFunc":
        return partial(self, i)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        """Value at a rational point; raises if the denominator vanishes there."""
        if len(point) != self.chart.dim:
            raise ValueError("point has wrong dimension")
        pt = [QQ(Fraction(v).numerator, Fraction(v).denominator) for v in point]
        d = self.den.evaluate(list(zip(self.chart.ring.gens, pt))) if self.chart.dim else self.den
        if d == 0:
            raise DivisionByZeroError("denominator vanishes at the sample point")
        n = self.num.evaluate(list(zip(self.chart.ring.gens, pt)))
        return _to_fraction(QQ.convert(n)) / _to_fraction(QQ.convert(d))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.chart == other.chart and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.chart.var_names, self.num, self.den))

    def __str__(self) -> str:
        return format_ratfunc(self)

    def __repr__(self) -> str:
        return f"RatFunc({format_ratfunc(self)!r})"


def is_zero(f: RatFunc) -> bool:
    """Exact test for the zero element of Q(x)."""
    return not f.num


def partial(f: RatFunc, i: Union[int, str]) -> RatFunc:
    """Partial derivative along the i-th chart variable (0-based index or name)."""
    chart = f.chart
    if isinstance(i, str):
        i = chart.index(i)
    if not 0 <= i < chart.dim:
        raise IndexError(f"variable index {i} out of range for a chart of dimension {chart.dim}")
    if not f.num:
        return f
    x = chart.ring.gens[i]
    if f.den.is_ground:
        return RatFunc(chart, f.num.diff(x), f.den)
    num = f.num.diff(x) * f.den - f.num * f.den.diff(x)
    return RatFunc.from_parts(chart, num, f.den**2)


# -- printing ---------------------------------------------------------------


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: PolyElement, names: Sequence[str]) -> str:
    if not p:
        return "0"
    out: list[str] = []
    for exps, c in p.terms():
        c = _to_fraction(c)
        mono = _format_monomial(names, exps)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{_format_coeff(a)}*{mono}"
        else:
            body = _format_coeff(a)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _is_atomic(p: PolyElement) -> bool:
    # a single monic term with at most one variable
    if len(p) != 1:
        return False
    (exps, c), = p.terms()
    return c == 1 and sum(1 for e in exps if e) <= 1


def format_ratfunc(f: RatFunc) -> str:
    names = f.chart.var_names
    num = format_poly(f.num, names)
    if f.den.is_ground:
        return num
    den = format_poly(f.den, names)
    if len(f.num) > 1:
        num = f"({num})"
    if not _is_atomic(f.den):
        den = f"({den})"
    return f"{num}/{den}"


# -- parsing ----------------------------------------------------------------


class ExpressionError(ValueError):
    """Base class for expression errors; ``pos`` is a 0-based column."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, pos: int | None = None):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", pos)


class DivisionByZeroError(ExpressionError, ZeroDivisionError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*/^()":
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr   := term (("+" | "-") term)*
    # term   := unary (("*" | "/") unary)*
    # unary  := ("+" | "-") unary | power
    # power  := atom ("^" unary)?
    # atom   := INT | NAME | "(" expr ")"

    def __init__(self, text: str, chart: Chart):
        self.chart = chart
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> RatFunc:
        if self.peek()[0] == "end":
            raise ExpressionSyntaxError("empty expression", 0)
        value = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected token {text!r}", pos)
        return value

    def expr(self) -> RatFunc:
        value = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZeroError("division by the zero polynomial", pos)
                value = value / rhs
        return value

    def unary(self) -> RatFunc:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            _, _, pos = self.take()
            exponent = self.unary()
            if not exponent.is_constant():
                raise ExpressionSyntaxError("exponent must be a constant", pos + 1)
            e = exponent.constant_value()
            if e.denominator != 1 or e < 0:
                raise ExpressionSyntaxError("exponent must be a nonnegative integer", pos + 1)
            return base ** int(e)
        return base

    def atom(self) -> RatFunc:
        kind, text, pos = self.take()
        if kind == "int":
            return self.chart.const(int(text))
        if kind == "name":
            if text not in self.chart.var_names:
                raise UnknownIdentifierError(text, pos)
            return self.chart.var(self.chart.var_names.index(text))
        if (kind, text) == ("op", "("):
            value = self.expr()
            kind2, text2, pos2 = self.take()
            if (kind2, text2) != ("op", ")"):
                raise ExpressionSyntaxError("expected ')'", pos2)
            return value
        if kind == "end":
            raise ExpressionSyntaxError("unexpected end of expression", pos)
        raise ExpressionSyntaxError(f"unexpected token {text!r}", pos)


def parse_expr(text: str, chart: Chart) -> RatFunc:
    """Parse ``text`` in the expression grammar and return its canonical value."""
    return _Parser(text, chart).parse()
