"""Exponential polynomials ``phi = sum_j a_j z^(-j/l)`` with Gaussian-rational coefficients.

The canonical form keeps the ramification index ``l`` minimal: ``l`` and
all stored exponent numerators ``j`` are coprime as a family. The zero
polynomial has ``l == 1`` and no coefficients.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping

import numpy as np

from .gaussian import QI, parse_qi

__all__ = [
    "ExpPolynomial",
    "ExpressionSyntaxError",
    "parse_exppoly",
    "katz_slope",
    "positive_proportionality",
    "ramify",
    "twist_add",
]


class ExpressionSyntaxError(ValueError):
    """Raised for malformed expressions; ``position`` is a 0-based column."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        caret = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {caret}")


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class ExpPolynomial:
    """An element of ``z^(-1/l) Q(i)[z^(-1/l)]`` in canonical form.

    Construct through :meth:`from_terms` (or the parser); the raw
    constructor expects already-canonical data.
    """

    ram_index: int = 1
    coeffs: tuple[tuple[int, QI], ...] = field(default=())

    # construction -----------------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping[int, object] | Iterable[tuple[int, object]],
                   ram_index: int = 1) -> "ExpPolynomial":
        """Build from ``{j: a_j}`` meaning ``a_j z^(-j/ram_index)``.

        Zero coefficients are dropped; repeated ``j`` are summed.
        """
        if ram_index < 1:
            raise ValueError("ramification index must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, QI] = {}
        for j, a in items:
            j = int(j)
            if j <= 0:
                raise ValueError("exponent numerators must be positive")
            acc[j] = acc.get(j, QI(0)) + QI.coerce(a)
        acc = {j: a for j, a in acc.items() if a}
        return cls._canonical(ram_index, acc)

    @classmethod
    def from_exponents(cls, terms: Iterable[tuple[Fraction, object]]) -> "ExpPolynomial":
        """Build from pairs ``(e, a)`` meaning ``a z^(-e)`` with rational ``e > 0``."""
        terms = [(Fraction(e), QI.coerce(a)) for e, a in terms]
        l = reduce(_lcm, (e.denominator for e, _ in terms), 1)
        return cls.from_terms([(int(e * l), a) for e, a in terms], l)

    @classmethod
    def _canonical(cls, l: int, acc: dict[int, QI]) -> "ExpPolynomial":
        if not acc:
            return cls(1, ())
        g = reduce(gcd, acc.keys(), l)
        items = tuple(sorted(((j // g, a) for j, a in acc.items()), reverse=True,
                             key=lambda t: t[0]))
        return cls(l // g, items)

    @classmethod
    def zero(cls) -> "ExpPolynomial":
        return cls(1, ())

    @classmethod
    def monomial(cls, a, j: int, l: int = 1) -> "ExpPolynomial":
        return cls.from_terms({j: a}, l)

    # basic accessors --------------------------------------------------------
    @property
    def l(self) -> int:
        return self.ram_index

    def as_dict(self) -> dict[int, QI]:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def pole_order(self) -> int:
        """Largest exponent numerator ``n`` (``-v(phi)`` measured in units of 1/l)."""
        return self.coeffs[0][0] if self.coeffs else 0

    @property
    def leading_coefficient(self) -> QI:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[0][1]

    def coefficient(self, j: int) -> QI:
        return self.as_dict().get(j, QI(0))

    def is_ramified(self) -> bool:
        return self.ram_index > 1

    def exponents(self) -> list[Fraction]:
        return [Fraction(j, self.ram_index) for j, _ in self.coeffs]

    # arithmetic -------------------------------------------------------------
    def _lift(self, l: int) -> dict[int, QI]:
        k = l // self.ram_index
        return {j * k: a for j, a in self.coeffs}

    def __add__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        if not isinstance(other, ExpPolynomial):
            return NotImplemented
        l = _lcm(self.ram_index, other.ram_index)
        acc = self._lift(l)
        for j, a in other._lift(l).items():
            acc[j] = acc.get(j, QI(0)) + a
        return ExpPolynomial._canonical(l, {j: a for j, a in acc.items() if a})

    def __neg__(self) -> "ExpPolynomial":
        return ExpPolynomial(self.ram_index, tuple((j, -a) for j, a in self.coeffs))

    def __sub__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        if not isinstance(other, ExpPolynomial):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ExpPolynomial":
        c = QI.coerce(c)
        if not c:
            return ExpPolynomial.zero()
        return ExpPolynomial(self.ram_index, tuple((j, c * a) for j, a in self.coeffs))

    def cover(self) -> "ExpPolynomial":
        """``phi(w^l)`` as an unramified polynomial in ``w``."""
        return ExpPolynomial(1, self.coeffs) if self.coeffs else self

    # numerics ---------------------------------------------------------------
    def coeff_array(self) -> np.ndarray:
        """Complex coefficients of the cover polynomial, index ``j`` -> ``a_j``."""
        arr = np.zeros(self.pole_order + 1, dtype=complex)
        for j, a in self.coeffs:
            arr[j] = complex(a)
        return arr

    def evaluate(self, z: complex, theta: float | None = None) -> complex:
        """Numeric value at ``z``; for ramified phi the determination uses ``theta``.

        ``theta`` is any real lift of ``arg z``; by default the principal one.
        """
        if not self.coeffs:
            return 0j
        r = abs(z)
        if r == 0:
            raise ZeroDivisionError("phi is singular at 0")
        t = cmath.phase(z) if theta is None else theta
        w_inv = cmath.rect(r ** (-1.0 / self.ram_index), -t / self.ram_index)
        total = 0j
        for j in range(self.pole_order, 0, -1):
            total = (total + complex(self.coefficient(j))) * w_inv
        return total

    # text -------------------------------------------------------------------
    def __str__(self):
        return format_exppoly(self)

    def __repr__(self):
        return f"ExpPolynomial({format_exppoly(self)!r})"


# --------------------------------------------------------------------------
# printing

def _format_coef(a: QI) -> tuple[str, str]:
    """Return (sign, magnitude-text) for a term coefficient."""
    if a.im == 0:
        sign = "-" if a.re < 0 else "+"
        mag = abs(a.re)
        return sign, (str(mag) if mag.denominator == 1 else f"({mag})")
    if a.re == 0:
        sign = "-" if a.im < 0 else "+"
        mag = abs(a.im)
        if mag == 1:
            return sign, "i"
        return sign, (f"{mag}i" if mag.denominator == 1 else f"({mag}i)")
    return "+", f"({a.format()})"


def _format_exponent(e: Fraction) -> str:
    if e == 1:
        return "z"
    if e.denominator == 1:
        return f"z^{e.numerator}"
    return f"z^({e.numerator}/{e.denominator})"


def format_exppoly(phi: ExpPolynomial) -> str:
    """Canonical text, terms in decreasing exponent order."""
    if phi.is_zero():
        return "0"
    parts = []
    for j, a in phi.coeffs:
        sign, mag = _format_coef(a)
        term = f"{mag}/{_format_exponent(Fraction(j, phi.ram_index))}"
        if not parts:
            parts.append(("-" if sign == "-" else "") + term)
        else:
            parts.append(f" {sign} {term}")
    return "".join(parts)


# --------------------------------------------------------------------------
# parsing

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        raise ExpressionSyntaxError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def number(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a number")
        return int(self.text[start:self.pos])

    def parse(self) -> ExpPolynomial:
        terms: list[tuple[Fraction, QI]] = []
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        if not self.peek():
            self.error("empty expression")
        while True:
            start = self.pos
            coef, exponent = self.term()
            if exponent is None:
                if coef:
                    self.error("constant term not allowed (exponents must be negative)", start)
            elif exponent <= 0:
                self.error("nonnegative exponent not allowed", start)
            elif coef:
                terms.append((exponent, coef * sign))
            ch = self.peek()
            if not ch:
                break
            if ch not in "+-":
                self.error(f"unexpected {ch!r}")
            sign = -1 if ch == "-" else 1
            self.pos += 1
        return ExpPolynomial.from_exponents(terms)

    def term(self) -> tuple[QI, Fraction | None]:
        ch = self.peek()
        coef = QI(1)
        if ch != "z":
            coef = self.coefficient()
        ch = self.peek()
        if ch == "/":
            self.pos += 1
            self.take("z")
            return coef, self.power()
        if ch == "*":
            self.pos += 1
            self.take("z")
            return coef, -self.power()
        if ch == "z":
            self.pos += 1
            return coef, -self.power()
        return coef, None

    def coefficient(self) -> QI:
        self.skip()
        start = self.pos
        ch = self.peek()
        if ch == "(":
            depth = 0
            while self.pos < len(self.text):
                c = self.text[self.pos]
                depth += c == "("
                depth -= c == ")"
                self.pos += 1
                if depth == 0:
                    break
            else:
                self.error("unbalanced parenthesis", start)
            try:
                return parse_qi(self.text[start:self.pos])
            except ValueError:
                self.error("malformed coefficient", start)
        if ch == "i":
            self.pos += 1
            return QI(0, 1)
        if not ch.isdigit():
            self.error("expected a coefficient")
        num = Fraction(self.number())
        save = self.pos
        if self.peek() == "/":
            self.pos += 1
            if self.peek().isdigit():
                num = num / self.number()
            else:
                self.pos = save
        if self.peek() == "i":
            self.pos += 1
            return QI(0, num)
        return QI(num)

    def power(self) -> Fraction:
        """Exponent after ``z``; returns e for ``z^e`` (default 1)."""
        if self.peek() != "^":
            return Fraction(1)
        self.pos += 1
        if self.peek() == "(":
            self.pos += 1
            neg = False
            if self.peek() in ("+", "-"):
                neg = self.peek() == "-"
                self.pos += 1
            e = Fraction(self.number())
            if self.peek() == "/":
                self.pos += 1
                d = self.number()
                if d == 0:
                    self.error("zero denominator in exponent")
                e /= d
            self.take(")")
            return -e if neg else e
        if self.peek() == "-":
            self.pos += 1
            return -Fraction(self.number())
        return Fraction(self.number())


def parse_exppoly(text: str) -> ExpPolynomial:
    """Parse an expression such as ``"(1+2i)/z^3 - 4/z"`` or ``"1/z^(3/2)"``.

    Terms are ``c/z^e`` or ``c*z^(-e)``; a term evaluating to a constant or a
    nonnegative power of ``z`` is rejected (``0`` alone is the zero polynomial).
    """
    if not isinstance(text, str):
        raise TypeError("expression must be a string")
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# invariants and operations

def katz_slope(phi: ExpPolynomial) -> Fraction:
    """``n/l`` in lowest terms; zero for the zero polynomial."""
    return Fraction(phi.pole_order, phi.ram_index)


def positive_proportionality(phi1: ExpPolynomial, phi2: ExpPolynomial) -> Fraction | None:
    """Return ``lam > 0`` with ``phi1 == lam * phi2``, or ``None``.

    Both zero gives 1. Any such ``lam`` is rational because the coefficients
    are Gaussian rationals.
    """
    if phi1.is_zero() and phi2.is_zero():
        return Fraction(1)
    if phi1.is_zero() or phi2.is_zero():
        return None
    if phi1.ram_index != phi2.ram_index or len(phi1.coeffs) != len(phi2.coeffs):
        return None
    lam = phi1.leading_coefficient / phi2.leading_coefficient
    if not lam.is_positive_real():
        return None
    for (j1, a1), (j2, a2) in zip(phi1.coeffs, phi2.coeffs):
        if j1 != j2 or a1 != lam * a2:
            return None
    return lam.re


def ramify(phi: ExpPolynomial, l: int) -> ExpPolynomial:
    """``phi o zeta`` for ``zeta`` an inverse branch of ``z -> z^l``."""
    if l < 1:
        raise ValueError("ramification must be a positive integer")
    return ExpPolynomial._canonical(phi.ram_index * l, phi.as_dict())


def twist_add(phi: ExpPolynomial, omega: ExpPolynomial) -> ExpPolynomial:
    """Exponent of ``L^phi (x) L^omega``: the sum over the common index."""
    return phi + omega
