"""Directional growth of exp(phi): support arcs, Stokes directions, verdicts, witnesses.

Write ``phi = sum a_j z^(-j/l)`` with top index ``n`` and ``s = n/l``. In the
direction ``theta`` the leading term behaves like ``|a_n| r^-s cos(s*theta - tau)``
with ``tau = Arg(a_n)``, so exp(phi) decays exactly where that cosine is
negative. For ramified phi angles are read on ``[0, 2*pi*l)`` (the l-fold
cover pushed down), which fixes the determination of ``z^(1/l)``.

All sign decisions go through the phase ``u = (s*theta - tau)/pi``. It is
computed exactly (as a rational) whenever the transcendental parts cancel,
and otherwise in multiprecision with escalation; an unresolvable
coincidence is reported as an endpoint with a flag.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .angles import DEFAULT_PRECISION, MAX_PRECISION, AngleExpr, arg_over_pi, decimal_string
from .exppoly import ExpPolynomial, format_exppoly, katz_slope, positive_proportionality, ramify, twist_add
from .gaussian import QI
from .regions import EtaImage, ParabolicU1, RegionSpec, Sector

__all__ = [
    "Direction",
    "Verdict",
    "Arc",
    "ArcSet",
    "Sector",
    "Witness",
    "HypothesisError",
    "support_arcs",
    "stokes_directions",
    "classify_direction",
    "classify_direction_flagged",
    "sector_verdict",
    "distinguishing_witness",
    "twisted_witness",
    "concentrated_region",
]


class Direction(enum.Enum):
    Decay = "Decay"
    Growth = "Growth"
    Oscillatory = "Oscillatory"


class Verdict(enum.Enum):
    Tempered = "Tempered"
    NotTempered = "NotTempered"
    Boundary = "Boundary"


class HypothesisError(ValueError):
    """An input violates the hypothesis of the construction it was passed to."""


def _require_nonzero(phi: ExpPolynomial):
    if phi.is_zero():
        raise ValueError("the zero polynomial has no support arcs; handle phi = 0 separately")


# --------------------------------------------------------------------------
# arcs

@dataclass(frozen=True)
class Arc:
    """Open arc from ``start`` counterclockwise to ``end``."""

    start: AngleExpr
    end: AngleExpr

    def length_over_pi(self) -> Fraction | mpmath.mpf:
        """Exact when both endpoints share their transcendental part."""
        a, b = self.start, self.end
        period = max(a.period, b.period)
        if a.arg_of == b.arg_of and a.divisor == b.divisor:
            return ((b.pi_multiple - a.pi_multiple) / a.divisor) % (2 * period)
        with mpmath.workprec(DEFAULT_PRECISION):
            d = (b.value() - a.value()) / mpmath.pi
            return d % (2 * period)

    def contains(self, theta: float) -> bool:
        period = max(self.start.period, self.end.period)
        full = 2 * math.pi * period
        return 0 < (theta - self.start.rad) % full < (self.end.rad - self.start.rad) % full

    def to_json(self, bits: int = DEFAULT_PRECISION) -> dict:
        return {
            "start_rad": decimal_string(self.start.value(bits), bits),
            "end_rad": decimal_string(self.end.value(bits), bits),
            "start_expr": str(self.start),
            "end_expr": str(self.end),
            "length_over_pi": str(self.length_over_pi()),
        }


@dataclass(frozen=True)
class ArcSet:
    arcs: tuple[Arc, ...]
    period: int = 1

    def __len__(self):
        return len(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def total_over_pi(self):
        return sum((a.length_over_pi() for a in self.arcs), Fraction(0))

    def contains(self, theta: float) -> bool:
        return any(a.contains(theta) for a in self.arcs)

    def to_json(self, bits: int = DEFAULT_PRECISION) -> dict:
        out = {"arcs": [a.to_json(bits) for a in self.arcs], "precision_bits": bits}
        if self.period != 1:
            out["period_turns"] = self.period
        return out


def _leading(phi: ExpPolynomial) -> tuple[int, QI, Fraction]:
    return phi.pole_order, phi.leading_coefficient, katz_slope(phi)


def support_arcs(phi: ExpPolynomial) -> ArcSet:
    """``{theta : cos(s*theta - Arg a_n) < 0}`` as n open arcs of length ``(l/n)*pi``."""
    _require_nonzero(phi)
    n, a, s = _leading(phi)
    l = phi.ram_index
    arcs = [Arc(AngleExpr(a, Fraction(1, 2) + 2 * m, s, l),
                AngleExpr(a, Fraction(3, 2) + 2 * m, s, l)) for m in range(n)]
    arcs.sort(key=lambda arc: arc.start.value())
    return ArcSet(tuple(arcs), l)


def stokes_directions(phi: ExpPolynomial) -> list[AngleExpr]:
    """The 2n directions ``(Arg a_n + pi/2 + k*pi)/s``, sorted."""
    _require_nonzero(phi)
    n, a, s = _leading(phi)
    dirs = [AngleExpr(a, Fraction(1, 2) + k, s, phi.ram_index) for k in range(2 * n)]
    return sorted(dirs, key=lambda d: d.value())


# --------------------------------------------------------------------------
# phases

def _exact_phase(phi: ExpPolynomial, theta: AngleExpr) -> Fraction | None:
    """``(s*theta - Arg a_n)/pi`` modulo 2 when it is rational, else None."""
    _, a, s = _leading(phi)
    tau = arg_over_pi(a)
    if theta.arg_of is None:
        if tau is None:
            return None
        return (s * theta.pi_value() - tau) % 2
    ratio = s / theta.divisor
    if ratio.denominator != 1:
        return None
    k = ratio.numerator
    # k*Arg(c) - Arg(a) = Arg(c^k / a) mod 2*pi
    rel = arg_over_pi(theta.arg_of ** k / a)
    if rel is None:
        return None
    # theta was reduced mod 2*pi*P; that shift contributes 2*s*P*m to the phase
    with mpmath.workprec(DEFAULT_PRECISION):
        q = mpmath.mpf(theta.pi_multiple.numerator) / theta.pi_multiple.denominator
        raw = (theta.arg_of.arg() + q * mpmath.pi) / (
            mpmath.mpf(theta.divisor.numerator) / theta.divisor.denominator)
        m = int(mpmath.floor(raw / (2 * mpmath.pi * theta.period)))
    return (rel + k * theta.pi_multiple - 2 * s * theta.period * m) % 2


def _numeric_phase(phi: ExpPolynomial, theta: AngleExpr, bits: int) -> mpmath.mpf:
    _, a, s = _leading(phi)
    with mpmath.workprec(bits + 16):
        sv = mpmath.mpf(s.numerator) / s.denominator
        u = (sv * theta.value(bits + 16) - a.arg()) / mpmath.pi
        return u % 2


def _dist_to_half_integers(u) -> mpmath.mpf:
    x = (u - mpmath.mpf(1) / 2) % 1
    return min(x, 1 - x)


def _classify_phase(u) -> Direction:
    r = u % 2
    if r == Fraction(1, 2) or r == Fraction(3, 2):
        return Direction.Oscillatory
    if Fraction(1, 2) < r < Fraction(3, 2):
        return Direction.Decay
    return Direction.Growth


def classify_direction_flagged(phi: ExpPolynomial, theta: AngleExpr,
                               max_bits: int = MAX_PRECISION) -> tuple[Direction, bool]:
    """Like :func:`classify_direction`; the flag marks precision exhaustion."""
    _require_nonzero(phi)
    exact = _exact_phase(phi, theta)
    if exact is not None:
        return _classify_phase(exact), False
    bits = DEFAULT_PRECISION
    while True:
        u = _numeric_phase(phi, theta, bits)
        with mpmath.workprec(bits):
            if _dist_to_half_integers(u) > mpmath.mpf(2) ** (-bits // 2):
                return (Direction.Decay if 0.5 < u < 1.5 else Direction.Growth), False
        if bits >= max_bits:
            return Direction.Oscillatory, True
        bits = min(2 * bits, max_bits)


def classify_direction(phi: ExpPolynomial, theta: AngleExpr) -> Direction:
    """Decay inside the support arcs, Growth outside their closure, Oscillatory on an endpoint."""
    return classify_direction_flagged(phi, theta)[0]


# --------------------------------------------------------------------------
# sectors

def _half_integer_crossings(u_lo, width, bits) -> tuple[int, bool]:
    """Half-integers strictly inside ``(u_lo, u_lo + width)`` and whether an end touches one."""
    if isinstance(u_lo, Fraction):
        a = u_lo - Fraction(1, 2)
        b = a + width
        touch = a.denominator == 1 or b.denominator == 1
        return math.ceil(b) - math.floor(a) - 1, touch
    tol = mpmath.mpf(2) ** (-bits // 2)
    with mpmath.workprec(bits + 16):
        a = u_lo - mpmath.mpf(1) / 2
        b = a + mpmath.mpf(width.numerator) / width.denominator
        touch = False
        ra, rb = mpmath.nint(a), mpmath.nint(b)
        if abs(a - ra) < tol:
            a, touch = ra, True
        if abs(b - rb) < tol:
            b, touch = rb, True
        return int(mpmath.ceil(b)) - int(mpmath.floor(a)) - 1, touch


def sector_verdict(phi: ExpPolynomial, s: Sector) -> Verdict:
    """Tempered if the closed direction interval sits inside the support arcs,
    NotTempered if the open interval leaves their closure, Boundary otherwise."""
    _require_nonzero(phi)
    eps = s.half_amplitude
    lo = s.center.shift(-eps)
    width = 2 * katz_slope(phi) * eps
    exact = _exact_phase(phi, lo)
    if exact is not None:
        inside, touch = _half_integer_crossings(exact, width, MAX_PRECISION)
    else:
        inside, touch = _half_integer_crossings(_numeric_phase(phi, lo, MAX_PRECISION), width,
                                                MAX_PRECISION)
    if inside > 0:
        return Verdict.NotTempered
    centre = classify_direction(phi, s.center)
    if centre is Direction.Growth:
        return Verdict.NotTempered
    if touch or centre is Direction.Oscillatory:
        return Verdict.Boundary
    return Verdict.Tempered


# --------------------------------------------------------------------------
# witnesses

@dataclass(frozen=True)
class Witness:
    """A direction where exactly one of exp(phi1), exp(phi2) is tempered.

    ``tempered_fn`` classifies as Decay (leading-data witnesses) or is the
    function tempered together with its negative on ``region`` (grid
    witnesses); ``growth_fn`` classifies as Growth. For ramified inputs the
    region lives in the cover coordinate ``w`` with ``z = w**cover``.
    """

    direction: AngleExpr
    tempered_side: int
    region: RegionSpec
    kind: str
    tempered_fn: ExpPolynomial
    growth_fn: ExpPolynomial
    cover: int = 1
    cover_direction: AngleExpr | None = None

    def to_json(self, bits: int = DEFAULT_PRECISION) -> dict:
        out = {
            "direction_rad": decimal_string(self.direction.value(bits), bits),
            "direction_expr": str(self.direction),
            "tempered_side": self.tempered_side,
            "kind": self.kind,
            "region": self.region.to_json(),
            "tempered_fn": format_exppoly(self.tempered_fn),
            "growth_fn": format_exppoly(self.growth_fn),
        }
        if self.cover != 1:
            out["cover"] = self.cover
            out["cover_direction_expr"] = str(self.cover_direction)
        return out


def _cover_poly(phi: ExpPolynomial, L: int) -> ExpPolynomial:
    """``phi(w**L)`` as an unramified polynomial in ``w``."""
    return ExpPolynomial.from_terms(phi._lift(L), 1)


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Simplest rational strictly between lo and hi (Stern-Brocot descent)."""
    fl = math.floor(lo)
    if fl + 1 < hi:
        return Fraction(fl + 1)
    if lo == fl:
        return fl + Fraction(1, math.floor(1 / (hi - fl)) + 1)
    return fl + 1 / _simplest_between(1 / (hi - fl), 1 / (lo - fl))


def _rational_inside(a, b) -> Fraction:
    """A rational multiple of pi (as a Fraction) in the middle of ``(a, b)``.

    Exact midpoint when both ends are rational; else the simplest rational in
    the middle third.
    """
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a + b) / 2
    fa = Fraction(float(a))
    fb = Fraction(float(b))
    third = (fb - fa) / 3
    return _simplest_between(fa + third, fb - third)


def _pi_position(angle: AngleExpr):
    v = angle.pi_value()
    if v is not None:
        return v
    with mpmath.workprec(DEFAULT_PRECISION):
        return angle.value() / mpmath.pi


def _sector_window(within: Sector | None, L: int):
    """The sector's direction interval in the cover, as (lo, hi) over pi, or None."""
    if within is None:
        return None
    c = _pi_position(within.center)
    eps = within.half_amplitude
    if isinstance(c, Fraction):
        return (c - eps) / L, (c + eps) / L
    return (c - float(eps)) / L, (c + float(eps)) / L


def _in_window(x, window) -> bool:
    if window is None:
        return True
    lo, hi = window
    span = hi - lo
    return 0 < (x - lo) % 2 < span


def _check_amplitude(within: Sector | None, n1: Fraction, n2: Fraction):
    if within is None:
        return
    bound = Fraction(2) / max(n1, n2, 2)
    if 2 * within.half_amplitude <= bound:
        raise HypothesisError(
            f"sector amplitude 2*{within.half_amplitude}*pi must exceed 2*pi/max(n1, n2, 2) = {bound}*pi")


def distinguishing_witness(phi1: ExpPolynomial, phi2: ExpPolynomial,
                           within: Sector | None = None) -> Witness | None:
    """None iff ``phi1 = lambda*phi2`` with lambda > 0; otherwise a :class:`Witness`."""
    _require_nonzero(phi1)
    _require_nonzero(phi2)
    if positive_proportionality(phi1, phi2) is not None:
        return None
    _check_amplitude(within, katz_slope(phi1), katz_slope(phi2))
    L = phi1.ram_index * phi2.ram_index // math.gcd(phi1.ram_index, phi2.ram_index)
    p1, p2 = _cover_poly(phi1, L), _cover_poly(phi2, L)
    window = _sector_window(within, L)
    a1, a2 = p1.leading_coefficient, p2.leading_coefficient
    if p1.pole_order != p2.pole_order or not (a2 / a1).is_positive_real():
        w = _leading_data_witness(p1, p2, window, L)
    else:
        w = _grid_witness(p1, p2, window, L)
    if w is None:
        raise RuntimeError(
            f"no witness found for {format_exppoly(phi1)} vs {format_exppoly(phi2)}; "
            "this contradicts the proportionality dichotomy and indicates a bug")
    return w


def _leading_data_witness(p1, p2, window, L) -> Witness | None:
    marks = []
    for p in (p1, p2):
        for d in stokes_directions(p):
            marks.append(_pi_position(d))
    marks = sorted(set(marks), key=float)
    gaps = [(marks[i], marks[i + 1]) for i in range(len(marks) - 1)]
    gaps.append((marks[-1], marks[0] + 2))
    for lo, hi in gaps:
        pieces = [(lo, hi)]
        if window is not None:
            pieces = _intersect(lo, hi, *window)
        for a, b in pieces:
            x = _rational_inside(a, b) % 2
            theta = AngleExpr.from_pi(x)
            c1 = classify_direction(p1, theta)
            c2 = classify_direction(p2, theta)
            if c1 is Direction.Decay and c2 is Direction.Growth:
                side, tf, gf = 1, p1, p2
            elif c2 is Direction.Decay and c1 is Direction.Growth:
                side, tf, gf = 2, p2, p1
            else:
                continue
            region = ParabolicU1(scale=0.5, rotation=float(x) * math.pi - math.pi / 2)
            return Witness(theta.lift(L) if L > 1 else theta, side, region, "leading",
                           tf, gf, L, theta if L > 1 else None)
    return None


def _intersect(lo, hi, wlo, whi):
    """Pieces of the circular intervals (lo, hi) and (wlo, whi), angles over pi mod 2."""
    out = []
    for shift in (-2, 0, 2):
        a = max(float(lo), float(wlo) + shift)
        b = min(float(hi), float(whi) + shift)
        if a < b:
            ea = lo if a == float(lo) else wlo + shift
            eb = hi if b == float(hi) else whi + shift
            out.append((ea, eb))
    return out


def _grid_witness(p1, p2, window, L) -> Witness | None:
    n = p1.pole_order
    a1, a2 = p1.leading_coefficient, p2.leading_coefficient
    lam = a2 / a1  # eta2/eta1, a positive rational
    psi21 = p2 - p1.scale(lam)
    psi12 = p1 - p2.scale(lam.inverse())
    for j in range(2 * n):
        theta = AngleExpr(a1, Fraction(1, 2) + j, n)
        if window is not None and not _in_window(_pi_position(theta), window):
            continue
        for psi, side, tf in ((psi12, 2, p2), (psi21, 1, p1)):
            if psi.is_zero():
                continue
            kind, flagged = classify_direction_flagged(psi, theta)
            if kind is Direction.Growth and not flagged:
                region = concentrated_region(tf, theta)
                return Witness(theta.lift(L) if L > 1 else theta, side, region, "grid",
                               tf, psi, L, theta if L > 1 else None)
    return None


def twisted_witness(phi1: ExpPolynomial, phi2: ExpPolynomial, omega: ExpPolynomial,
                    l: int) -> Witness | None:
    """Compare ``exp(phi1(z^(1/l)) + omega)`` with ``exp(phi2(z^(1/l)) + omega)``.

    Requires ``katz(omega) > max_j katz(ramify(phi_j, l)) + 1``.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    r1, r2 = ramify(phi1, l), ramify(phi2, l)
    need = max(katz_slope(r1), katz_slope(r2)) + 1
    if not katz_slope(omega) > need:
        raise HypothesisError(
            f"pole order of omega ({katz_slope(omega)}) must exceed max katz(phi_j o zeta) + 1 = {need}")
    if r1 == r2:
        return None
    return distinguishing_witness(twist_add(r1, omega), twist_add(r2, omega))


def concentrated_region(phi: ExpPolynomial, theta: AngleExpr, order: int = 16) -> RegionSpec:
    """A set concentrated along the Stokes direction ``theta`` where exp(+-phi) are tempered."""
    _require_nonzero(phi)
    if phi.ram_index != 1:
        raise ValueError("concentrated_region works on an unramified phi (pass the cover polynomial)")
    n, a, _ = _leading(phi)
    target = float(_pi_position(theta))
    for k in range(2 * n):
        cand = AngleExpr(a, Fraction(1, 2) + k, n)
        diff = abs(float(_pi_position(cand)) - target) % 2
        if cand == theta or min(diff, 2 - diff) < 1e-12:
            return EtaImage(phi, k, order=order)
    raise ValueError(f"{theta} is not a Stokes direction of {format_exppoly(phi)}")
