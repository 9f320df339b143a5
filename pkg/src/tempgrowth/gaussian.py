"""Exact arithmetic in the Gaussian rationals Q(i)."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

import mpmath

__all__ = ["QI", "parse_qi", "exact_nth_root", "mpf_to_fraction"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class QI:
    """A Gaussian rational ``re + im*i`` with :class:`Fraction` parts.

    Instances are immutable and hashable; equality is exact.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, str):
            return parse_qi(x)
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        return cls(x)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "QI":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QI(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = QI(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # predicates -----------------------------------------------------------
    def __eq__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self

    def is_real(self) -> bool:
        return self.im == 0

    def is_positive_real(self) -> bool:
        return self.im == 0 and self.re > 0

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    # numerics -------------------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_mpc(self) -> mpmath.mpc:
        return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                          mpmath.mpf(self.im.numerator) / self.im.denominator)

    def arg(self) -> mpmath.mpf:
        """Principal argument in (-pi, pi] at the current mpmath precision."""
        if not self:
            raise ValueError("arg of zero is undefined")
        return mpmath.arg(self.to_mpc())

    # text -----------------------------------------------------------------
    def __repr__(self):
        return f"QI({str(self)!r})"

    def __str__(self):
        return self.format()

    def format(self, ascii_i: bool = True) -> str:
        """Render as ``a``, ``b i``-free forms like ``1/2``, ``2i``, ``1+2i``."""
        re_, im_ = self.re, self.im
        if im_ == 0:
            return str(re_)
        if im_ == 1:
            ims = "i"
        elif im_ == -1:
            ims = "-i"
        else:
            ims = f"{im_}i" if im_.denominator == 1 else f"{im_.numerator}/{im_.denominator}i"
        if re_ == 0:
            return ims
        if ims.startswith("-"):
            return f"{re_}{ims}"
        return f"{re_}+{ims}"

    def matrix_entry(self) -> str:
        """Serialization used by the GoodModel JSON schema (``"a/b+c/d i"``)."""
        if self.im == 0:
            return str(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)} i"


def _maybe(x):
    if isinstance(x, QI):
        return x
    if isinstance(x, (int, Fraction)):
        return QI(x)
    return None


_NUM = r"\d+(?:/\d+)?"
_REAL = re.compile(rf"^(?P<re>[+-]?{_NUM})$")
_IMAG = re.compile(rf"^(?P<isign>[+-]?)(?P<im>{_NUM})?\*?i$")
_BOTH = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<isign>[+-])(?P<im>{_NUM})?\*?i$")


def parse_qi(text: str) -> QI:
    """Parse ``"3"``, ``"-1/2"``, ``"2i"``, ``"1+2i"``, ``"1/2-3/4 i"``, ``"(1+2i)"``."""
    s = "".join(text.split())
    while s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    for pattern in (_REAL, _IMAG, _BOTH):
        m = pattern.match(s)
        if m is not None:
            break
    else:
        raise ValueError(f"malformed Gaussian rational literal: {text!r}")
    groups = m.groupdict()
    re_part = Fraction(groups["re"]) if groups.get("re") else Fraction(0)
    im_part = Fraction(0)
    if "isign" in groups:
        im_part = Fraction(groups["im"]) if groups["im"] else Fraction(1)
        if groups["isign"] == "-":
            im_part = -im_part
    return QI(re_part, im_part)


def mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    """Exact binary value of an mpf as a Fraction."""
    sign, man, exp, _ = x._mpf_
    if not man and exp:
        raise ValueError(f"cannot convert {x} to a Fraction")
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def exact_nth_root(c: QI, n: int) -> QI | None:
    """Principal n-th root of ``c`` if it lies in Q(i), else ``None``.

    The principal root has argument in (-pi/n, pi/n]. A Gaussian-rational
    root ``g/d`` with coprime Gaussian integers has ``N(d)**n`` dividing
    ``D**2`` where ``D`` is the common rational denominator of ``c``, which
    bounds the denominator search.
    """
    if n < 1:
        raise ValueError("root index must be positive")
    if not c:
        return QI(0)
    if n == 1:
        return c
    den = c.re.denominator * c.im.denominator
    bound = den * den
    num_bits = max(abs(c.re.numerator), abs(c.im.numerator), 1).bit_length()
    prec = 4 * bound.bit_length() + 2 * num_bits + 64
    with mpmath.workprec(prec):
        r = mpmath.root(c.to_mpc(), n)
        cand = QI(mpf_to_fraction(r.real).limit_denominator(bound),
                  mpf_to_fraction(r.imag).limit_denominator(bound))
    if cand ** n == c:
        return cand
    return None
