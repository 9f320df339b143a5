"""Truncated power series, the normalizing map eta(z) = z*sigma(z), and level-curve tracing.

``sigma`` solves ``sigma^n = sum_j a_j z^(n-j) sigma^(n-j)`` so that
``phi(z*sigma(z)) = z^(-n)``. Coefficients are exact: they live in Q(i)
when the leading coefficient has a Gaussian-rational n-th root, and in
``Q(i)[rho]/(rho^n - a_n)`` otherwise.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq

from .exppoly import ExpPolynomial
from .gaussian import QI, exact_nth_root

__all__ = [
    "RootExt",
    "PowerSeries",
    "series_arith",
    "sigma_solve",
    "eta_residual",
    "Polyline",
    "level_curve_branches",
    "polylines_to_csv",
    "polylines_to_svg",
    "TracerWarning",
]

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# coefficient ring with one adjoined radical

class RootExt:
    """Element ``sum_k c_k rho^k`` (k < n) of ``Q(i)[rho]/(rho^n - base)``.

    ``rho`` is interpreted numerically as the principal n-th root of ``base``.
    """

    __slots__ = ("n", "base", "parts")

    def __init__(self, n: int, base: QI, parts: Sequence[QI]):
        self.n = n
        self.base = base
        p = list(parts) + [QI(0)] * (n - len(parts))
        self.parts = tuple(p[:n])

    @classmethod
    def rho(cls, n: int, base: QI) -> "RootExt":
        if n == 1:
            return cls(1, base, [base])
        return cls(n, base, [QI(0), QI(1)])

    def _same(self, other) -> "RootExt":
        if isinstance(other, RootExt):
            if other.n != self.n or other.base != self.base:
                raise ValueError("mixing elements of different radical extensions")
            return other
        return RootExt(self.n, self.base, [QI.coerce(other)])

    def __add__(self, other):
        o = self._same(other)
        return RootExt(self.n, self.base, [a + b for a, b in zip(self.parts, o.parts)])

    __radd__ = __add__

    def __neg__(self):
        return RootExt(self.n, self.base, [-a for a in self.parts])

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            c = QI.coerce(other)
            return RootExt(self.n, self.base, [c * a for a in self.parts])
        o = self._same(other)
        acc = [QI(0)] * (2 * self.n)
        for i, a in enumerate(self.parts):
            if not a:
                continue
            for j, b in enumerate(o.parts):
                if b:
                    acc[i + j] = acc[i + j] + a * b
        for k in range(2 * self.n - 1, self.n - 1, -1):
            if acc[k]:
                acc[k - self.n] = acc[k - self.n] + acc[k] * self.base
        return RootExt(self.n, self.base, acc[: self.n])

    __rmul__ = __mul__

    def inverse(self) -> "RootExt":
        nz = [(k, a) for k, a in enumerate(self.parts) if a]
        if len(nz) != 1:
            raise ZeroDivisionError("only monomials c*rho^k are inverted in the radical ring")
        k, a = nz[0]
        # rho^-k = rho^(n-k) / base
        if k == 0:
            return RootExt(self.n, self.base, [a.inverse()])
        parts = [QI(0)] * self.n
        parts[self.n - k] = (a * self.base).inverse()
        return RootExt(self.n, self.base, parts)

    def __truediv__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            return self * QI.coerce(other).inverse()
        return self * self._same(other).inverse()

    def __eq__(self, other):
        try:
            o = self._same(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.parts == o.parts

    def __hash__(self):
        return hash((self.n, self.base, self.parts))

    def __bool__(self):
        return any(self.parts)

    def rho_value(self) -> mpmath.mpc:
        return mpmath.root(self.base.to_mpc(), self.n)

    def to_mpc(self) -> mpmath.mpc:
        r = self.rho_value()
        return mpmath.fsum(a.to_mpc() * r ** k for k, a in enumerate(self.parts))

    def __complex__(self):
        return complex(self.to_mpc())

    def __repr__(self):
        terms = []
        for k, a in enumerate(self.parts):
            if a:
                terms.append(f"({a})" + ("" if k == 0 else f"*rho^{k}"))
        return " + ".join(terms) or "0"


def _zero_like(c):
    return c * 0 if isinstance(c, RootExt) else QI(0)


def _one_like(c):
    return RootExt(c.n, c.base, [QI(1)]) if isinstance(c, RootExt) else QI(1)


# --------------------------------------------------------------------------
# truncated power series

@dataclass(frozen=True)
class PowerSeries:
    """``sum_{k<=order} coeffs[k] z^k + O(z^(order+1))`` with exact coefficients."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be nonnegative")
        c = tuple(self.coeffs[: self.order + 1])
        if len(c) < self.order + 1:
            fill = _zero_like(c[0]) if c else QI(0)
            c = c + (fill,) * (self.order + 1 - len(c))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_list(cls, coeffs, order: int) -> "PowerSeries":
        return cls(tuple(c if isinstance(c, RootExt) else QI.coerce(c) for c in coeffs), order)

    @classmethod
    def constant(cls, c, order: int) -> "PowerSeries":
        return cls.from_list([c], order)

    @classmethod
    def variable(cls, order: int) -> "PowerSeries":
        return cls.from_list([0, 1], order)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def valuation(self) -> int | None:
        """Index of the first nonzero known coefficient (None if all vanish)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs, min(order, self.order))

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(other, self.order)
        n = min(self.order, other.order)
        return PowerSeries(tuple(self[k] + other[k] for k in range(n + 1)), n)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(other, self.order)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(tuple(c * other for c in self.coeffs), self.order)
        n = min(self.order, other.order)
        out = []
        for k in range(n + 1):
            acc = None
            for i in range(k + 1):
                a, b = self[i], other[k - i]
                if a and b:
                    acc = a * b if acc is None else acc + a * b
            out.append(acc if acc is not None else _zero_like(self[0] * other[0]))
        return PowerSeries(tuple(out), n)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = PowerSeries.constant(_one_like(self[0]), self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "PowerSeries":
        c0 = self[0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not a unit")
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = _zero_like(c0)
            for i in range(1, k + 1):
                if self[i]:
                    acc = acc + self[i] * out[k - i]
            out.append(-(acc * inv0))
        return PowerSeries(tuple(out), self.order)

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            inv = other.inverse() if isinstance(other, RootExt) else QI.coerce(other).inverse()
            return self * inv
        return self * other.inverse()

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """``self(inner)``; ``inner`` must have zero constant term."""
        if inner[0]:
            raise ValueError("composition requires an inner series with zero constant term")
        v = inner.valuation()
        if v is None:
            return PowerSeries.constant(self[0], inner.order)
        order = min((self.order + 1) * v - 1, inner.order)
        inner = inner.truncate(order)
        acc = PowerSeries.constant(self[self.order], order)
        for k in range(self.order - 1, -1, -1):
            acc = acc * inner + self[k]
        return acc.truncate(order)

    def nth_root(self, n: int) -> "PowerSeries":
        """Principal branch: the constant term's root has arg in (-pi/n, pi/n].

        When that root is not Gaussian rational the result has coefficients in
        the radical extension ``Q(i)[rho]/(rho^n - c0)``.
        """
        if n < 1:
            raise ValueError("root index must be positive")
        c0 = self[0]
        if not c0:
            raise ZeroDivisionError("nth_root needs a unit constant term")
        if isinstance(c0, RootExt):
            raise TypeError("nth_root of radical-extension series is not supported")
        root = exact_nth_root(c0, n)
        lead = root if root is not None else RootExt.rho(n, c0)
        # (1 + x)^(1/n) with x = self/c0 - 1, binomial coefficients are rational
        x = (self / c0) - QI(1)
        binom = []
        coef = Fraction(1)
        for k in range(self.order + 1):
            binom.append(QI(coef))
            coef = coef * (Fraction(1, n) - k) / (k + 1)
        unit = PowerSeries.from_list(binom, self.order).compose(x)
        return unit * lead

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def to_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs])

    def __repr__(self):
        terms = [f"({c})*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms or ["0"]) + f" + O(z^{self.order + 1})"


def series_arith(a: PowerSeries, b, op: str) -> PowerSeries:
    """Dispatch ``op`` in {add, sub, mul, div, nth_root, compose}.

    For ``nth_root`` the second argument is the integer root index.
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "nth_root":
        return a.nth_root(int(b))
    if op == "compose":
        return a.compose(b)
    raise ValueError(f"unknown series operation {op!r}")


# --------------------------------------------------------------------------
# sigma and the residual of eta

def _require_unramified(phi: ExpPolynomial):
    if phi.is_zero():
        raise ValueError("phi must be nonzero")
    if phi.ram_index != 1:
        raise ValueError("phi must be unramified (l = 1)")


def sigma_constant(phi: ExpPolynomial):
    """Principal n-th root of the leading coefficient, exact or adjoined."""
    _require_unramified(phi)
    n, a_n = phi.pole_order, phi.leading_coefficient
    root = exact_nth_root(a_n, n)
    return root if root is not None else RootExt.rho(n, a_n)


def _sigma_defect(phi: ExpPolynomial, sigma: PowerSeries) -> PowerSeries:
    """``sigma^n - sum_j a_j z^(n-j) sigma^(n-j)`` (truncated)."""
    n = phi.pole_order
    N = sigma.order
    powers = [PowerSeries.constant(_one_like(sigma[0]), N)]
    for _ in range(n):
        powers.append(powers[-1] * sigma)
    out = powers[n]
    for j, a in phi.coeffs:
        shift = n - j
        term = powers[n - j] * a
        coeffs = tuple(_zero_like(sigma[0]) for _ in range(shift)) + term.coeffs
        out = out - PowerSeries(coeffs, N)
    return out


def sigma_solve(phi: ExpPolynomial, N: int) -> PowerSeries:
    """Coefficients of sigma through order ``N`` (exact)."""
    _require_unramified(phi)
    if N < 0:
        raise ValueError("order must be nonnegative")
    n = phi.pole_order
    a_n = phi.leading_coefficient
    s0 = sigma_constant(phi)
    # 1/(n s0^(n-1)) = s0 / (n a_n)
    pivot = s0 * (a_n * n).inverse()
    coeffs = [s0]
    for k in range(1, N + 1):
        trial = PowerSeries(tuple(coeffs) + (_zero_like(s0),), k)
        defect = _sigma_defect(phi, trial)[k]
        coeffs.append(-(defect * pivot))
    return PowerSeries(tuple(coeffs), N)


def _poly_mul(p: list, q: list, zero) -> list:
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] = out[i + j] + a * b
    return out


def eta_residual(phi: ExpPolynomial, N: int) -> int | float:
    """Valuation of ``phi(z*sigma(z)) - z^(-n)`` for sigma truncated at order ``N``.

    Computed exactly on the polynomial truncation. Returns ``math.inf`` when
    the residual vanishes identically.
    """
    sigma = sigma_solve(phi, N)
    n = phi.pole_order
    zero = _zero_like(sigma[0])
    s = list(sigma.coeffs)
    powers = [[_one_like(sigma[0])]]
    for _ in range(n):
        powers.append(_poly_mul(powers[-1], s, zero))
    # z^n phi(z sigma) - 1 = (sum_j a_j z^(n-j) sigma^(n-j) - sigma^n) / sigma^n
    numer = [-c for c in powers[n]]
    for j, a in phi.coeffs:
        term = [zero] * (n - j) + [c * a for c in powers[n - j]]
        if len(term) > len(numer):
            numer = numer + [zero] * (len(term) - len(numer))
        for i, c in enumerate(term):
            numer[i] = numer[i] + c
    for k, c in enumerate(numer):
        if c:
            return k - n
    return math.inf


# --------------------------------------------------------------------------
# level curves Re phi = A

class TracerWarning(UserWarning):
    """Root solver failed; the polyline was cut short."""


@dataclass(frozen=True)
class Polyline:
    points: tuple[tuple[float, float], ...]
    branch_index: int

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, 2)


def _dominance_radius(phi: ExpPolynomial, A: float) -> float:
    """Largest rho with |a_n| rho^-n >= 2 (A + sum_{j<n} |a_j| rho^-j)."""
    n = phi.pole_order
    an = abs(complex(phi.leading_coefficient))
    lower = [(j, abs(complex(a))) for j, a in phi.coeffs if j < n]

    def excess(r):
        return an - 2.0 * (A * r ** n + sum(c * r ** (n - j) for j, c in lower))

    hi = 1.0
    while excess(hi) > 0 and hi < 1e6:
        hi *= 2
    lo = hi / 2
    while excess(lo) <= 0:
        lo /= 2
    return brentq(excess, lo, hi) if excess(hi) < 0 else hi


def level_curve_branches(phi: ExpPolynomial, A, samples: int = 64, *,
                         rho_max: float | None = None,
                         rho_min: float | None = None,
                         tol: float = 1e-9) -> list[Polyline]:
    """Trace the 2n branches of ``Re phi = A`` toward the origin.

    Each branch is seeded at a Stokes direction. For each modulus on a
    geometric grid from ``rho_max`` down to ``rho_min`` the angle is found by
    bracketing between the neighbouring extrema of the leading term, then
    polished with Newton steps from the previous solution.
    """
    if phi.is_zero() or phi.ram_index != 1:
        raise ValueError("level curves need a nonzero unramified phi")
    A = float(Fraction(A))
    if A <= 0:
        raise ValueError("A must be positive")
    n = phi.pole_order
    coeffs = phi.coeff_array()
    an = coeffs[n]
    tau = math.atan2(an.imag, an.real)

    if rho_max is None:
        rho_max = min(1.0, _dominance_radius(phi, A))
    if rho_min is None:
        # float rounding of a point moves Re phi by about n |a_n| rho^-n eps
        target = 0.01 * tol * max(1.0, A)
        rho_min = (n * abs(an) * np.finfo(float).eps / target) ** (1.0 / n)
        rho_min = min(max(rho_min, rho_max * 1e-6), rho_max * 0.5)
    rhos = np.geomspace(rho_max, rho_min, max(int(samples), 2))
    thr = tol * max(1.0, A)

    def re_phi(rho, theta):
        w = 1.0 / (rho * complex(math.cos(theta), math.sin(theta)))
        return np.polyval(coeffs[::-1], w).real

    def d_re_phi(rho, theta):
        z = rho * complex(math.cos(theta), math.sin(theta))
        w = 1.0 / z
        # d/dtheta phi(rho e^{i theta}) = i z phi'(z) = -i sum j a_j w^j
        deriv = sum(-1j * j * coeffs[j] * w ** j for j in range(1, n + 1))
        return deriv.real

    out = []
    half = math.pi / (2 * n)
    for k in range(2 * n):
        stokes = (tau + math.pi / 2 + k * math.pi) / n
        pts: list[tuple[float, float]] = []
        theta_prev = stokes
        for rho in rhos:
            f = lambda t, r=rho: re_phi(r, t) - A
            theta = theta_prev
            ok = False
            for _ in range(8):
                val = f(theta)
                if abs(val) < 0.01 * thr:
                    ok = True
                    break
                d = d_re_phi(rho, theta)
                if d == 0:
                    break
                theta -= val / d
            if not ok or abs(theta - stokes) >= half:
                lo, hi = stokes - half, stokes + half
                try:
                    if f(lo) * f(hi) > 0:
                        raise ValueError("no sign change")
                    theta = brentq(f, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps)
                except ValueError:
                    warnings.warn(f"branch {k}: root solver diverged at rho={rho:.3g}",
                                  TracerWarning, stacklevel=2)
                    break
                for _ in range(3):
                    d = d_re_phi(rho, theta)
                    if d == 0:
                        break
                    step = f(theta) / d
                    theta -= step
                    if abs(step) < 1e-17:
                        break
            x, y = rho * math.cos(theta), rho * math.sin(theta)
            if abs(np.polyval(coeffs[::-1], 1.0 / complex(x, y)).real - A) >= thr:
                warnings.warn(f"branch {k}: residual above tolerance at rho={rho:.3g}",
                              TracerWarning, stacklevel=2)
                break
            pts.append((float(x), float(y)))
            theta_prev = theta
        out.append(Polyline(tuple(pts), k))
    return out


def polylines_to_csv(polylines: Sequence[Polyline]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["branch", "x", "y"])
    for pl in polylines:
        for x, y in pl.points:
            writer.writerow([pl.branch_index, repr(x), repr(y)])
    return buf.getvalue()


def polylines_to_svg(polylines: Sequence[Polyline], stroke_width: float = 0.004) -> str:
    """Minimal SVG, one ``<path>`` per branch, math orientation (y up)."""
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1 -1 2 2" width="512" height="512">',
        '<g transform="scale(1,-1)" fill="none" stroke="black" '
        f'stroke-width="{stroke_width}">',
    ]
    for pl in polylines:
        if not pl.points:
            continue
        d = " ".join(("M" if i == 0 else "L") + f"{x:.6g},{y:.6g}"
                     for i, (x, y) in enumerate(pl.points))
        lines.append(f'<path data-branch="{pl.branch_index}" d="{d}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
