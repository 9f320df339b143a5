"""Symbolically tagged angles ``(arg(c) + q*pi) / d`` with multiprecision evaluation."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .gaussian import QI

__all__ = ["AngleExpr", "arg_over_pi", "DEFAULT_PRECISION", "MAX_PRECISION", "decimal_string"]

DEFAULT_PRECISION = 128
MAX_PRECISION = 512


def arg_over_pi(c: QI) -> Fraction | None:
    """Exact ``Arg(c)/pi`` in (-1, 1] when ``c`` is real or purely imaginary."""
    if not c:
        raise ValueError("arg of zero is undefined")
    if c.im == 0:
        return Fraction(0) if c.re > 0 else Fraction(1)
    if c.re == 0:
        return Fraction(1, 2) if c.im > 0 else Fraction(-1, 2)
    return None


def _primitive(c: QI) -> QI:
    """Positive rational multiple of ``c`` with coprime integer parts (same argument)."""
    den = math.lcm(c.re.denominator, c.im.denominator)
    a, b = int(c.re * den), int(c.im * den)
    g = math.gcd(a, b)
    return QI(a // g, b // g)


def decimal_string(x: mpmath.mpf, bits: int) -> str:
    digits = max(int(bits * 0.30103) - 1, 15)
    return mpmath.nstr(x, digits, strip_zeros=False)


@dataclass(frozen=True)
class AngleExpr:
    """The angle ``(Arg(arg_of) + pi_multiple*pi) / divisor`` reduced mod ``2*pi*period``.

    ``divisor`` is a positive rational and ``period`` a positive integer; angles
    of a ramified phi live on ``[0, 2*pi*l)``. When ``arg_of`` is real or purely
    imaginary its argument is folded into ``pi_multiple``.
    """

    arg_of: QI | None = None
    pi_multiple: Fraction = Fraction(0)
    divisor: Fraction = Fraction(1)
    period: int = 1

    def __post_init__(self):
        d = Fraction(self.divisor)
        if d <= 0:
            raise ValueError("divisor must be positive")
        if self.period < 1:
            raise ValueError("period must be a positive integer")
        q = Fraction(self.pi_multiple)
        c = self.arg_of
        if c is not None:
            c = QI.coerce(c)
            folded = arg_over_pi(c)
            if folded is not None:
                q += folded
                c = None
            else:
                c = _primitive(c)
        q %= 2 * d * self.period
        object.__setattr__(self, "arg_of", c)
        object.__setattr__(self, "pi_multiple", q)
        object.__setattr__(self, "divisor", d)

    @classmethod
    def from_pi(cls, multiple, period: int = 1) -> "AngleExpr":
        """The angle ``multiple * pi``."""
        return cls(None, Fraction(multiple), Fraction(1), period)

    # exact views ---------------------------------------------------------
    def is_rational(self) -> bool:
        return self.arg_of is None

    def pi_value(self) -> Fraction | None:
        """Exact value divided by pi, in ``[0, 2*period)``, or None if transcendental."""
        if self.arg_of is not None:
            return None
        return self.pi_multiple / self.divisor

    def shift(self, pi_delta) -> "AngleExpr":
        """Add ``pi_delta * pi``."""
        return AngleExpr(self.arg_of, self.pi_multiple + Fraction(pi_delta) * self.divisor,
                         self.divisor, self.period)

    def lift(self, factor: int) -> "AngleExpr":
        """Multiply by a positive integer (push a cover angle down to the base)."""
        return AngleExpr(self.arg_of, self.pi_multiple, self.divisor / factor,
                         self.period * factor)

    def with_period(self, period: int) -> "AngleExpr":
        return AngleExpr(self.arg_of, self.pi_multiple, self.divisor, period)

    # numerics ------------------------------------------------------------
    def value(self, bits: int = DEFAULT_PRECISION) -> mpmath.mpf:
        with mpmath.workprec(bits + 16):
            q = mpmath.mpf(self.pi_multiple.numerator) / self.pi_multiple.denominator
            d = mpmath.mpf(self.divisor.numerator) / self.divisor.denominator
            raw = q * mpmath.pi
            if self.arg_of is not None:
                raw += self.arg_of.arg()
            v = raw / d
            full = 2 * mpmath.pi * self.period
            v = v - full * mpmath.floor(v / full)
        with mpmath.workprec(bits):
            return +v

    @functools.cached_property
    def rad(self) -> float:
        return float(self.value())

    def __float__(self):
        return self.rad

    # text ----------------------------------------------------------------
    def __str__(self):
        if self.arg_of is None:
            v = self.pi_value()
            if v == 0:
                return "0"
            if v == 1:
                return "π"
            return f"{v}·π"
        body = f"arg({self.arg_of})"
        if self.pi_multiple:
            body += f"+{self.pi_multiple}·π"
        if self.divisor == 1:
            return body if not self.pi_multiple else f"({body})"
        return f"({body})/{self.divisor}"

    def to_json(self, bits: int = DEFAULT_PRECISION) -> dict:
        out = {"rad": decimal_string(self.value(bits), bits), "expr": str(self)}
        if self.period != 1:
            out["period_turns"] = self.period
        return out
