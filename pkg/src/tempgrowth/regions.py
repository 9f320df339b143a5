"""Test regions for the growth oracle.

Every region supports vectorized ``contains`` and ``boundary_distance`` on
complex arrays, a bounding radius, and a quasi-random proposal map from the
unit square used by :func:`tempgrowth.oracle.sample_region`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .angles import AngleExpr
from .exppoly import ExpPolynomial, format_exppoly
from .gaussian import QI

__all__ = [
    "RegionSpec",
    "Sector",
    "BallComplement",
    "ParabolicU1",
    "ParabolicU2",
    "Sublevel",
    "EtaImage",
    "Polygon",
    "RADIAL_FLOOR",
    "DISTANCE_SAFETY",
]

# samples are stratified in log-radius down to this fraction of the bounding radius
RADIAL_FLOOR = 1e-4
DISTANCE_SAFETY = 0.9


def _wrap(x):
    """Wrap angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - x, 2 * np.pi)


def _log_radius(u, rmax: float, floor: float = RADIAL_FLOOR):
    lo = math.log(rmax * floor)
    return np.exp(lo + (math.log(rmax) - lo) * u)


class RegionSpec:
    """Base class. Subclasses are frozen dataclasses."""

    kind = "region"

    def contains(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def membership(self, z: complex) -> bool:
        return bool(self.contains(np.array([z], dtype=complex))[0])

    def boundary_distance(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounding_radius(self) -> float:
        raise NotImplementedError

    def propose(self, u: np.ndarray) -> np.ndarray:
        """Map points of the unit square (shape (m, 2)) to candidate points."""
        r = self.bounding_radius()
        rho = _log_radius(u[:, 0], r)
        theta = 2 * np.pi * u[:, 1]
        return rho * np.exp(1j * theta)

    def probes(self, count: int) -> np.ndarray:
        """Extra deterministic points for the growth test (none by default)."""
        return np.empty(0, dtype=complex)

    def to_json(self) -> dict:
        raise NotImplementedError


# --------------------------------------------------------------------------

def _segment_dist_from_origin(z, direction: float, length: float):
    u = complex(math.cos(direction), math.sin(direction))
    t = np.clip((z * np.conj(u)).real, 0.0, length)
    return np.abs(z - t * u)


@dataclass(frozen=True)
class Sector(RegionSpec):
    """Open sector of directions ``center +- half_amplitude*pi`` and modulus below ``radius``."""

    center: AngleExpr
    half_amplitude: Fraction
    radius: Fraction = Fraction(1)

    kind = "Sector"

    def __post_init__(self):
        eps = Fraction(self.half_amplitude)
        if not 0 < eps < 1:
            raise ValueError("half amplitude must lie strictly between 0 and pi")
        if Fraction(self.radius) <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "half_amplitude", eps)
        object.__setattr__(self, "radius", Fraction(self.radius))

    @property
    def _c(self) -> float:
        return self.center.rad

    @property
    def _eps(self) -> float:
        return float(self.half_amplitude) * math.pi

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        a = np.abs(z)
        dth = np.abs(_wrap(np.angle(z) - self._c))
        return (a > 0) & (a < float(self.radius)) & (dth < self._eps)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        r = float(self.radius)
        d1 = _segment_dist_from_origin(z, self._c - self._eps, r)
        d2 = _segment_dist_from_origin(z, self._c + self._eps, r)
        return np.minimum(np.minimum(d1, d2), r - np.abs(z))

    def bounding_radius(self):
        return float(self.radius)

    def propose(self, u):
        rho = _log_radius(u[:, 0], float(self.radius))
        theta = self._c + self._eps * (2 * u[:, 1] - 1)
        return rho * np.exp(1j * theta)

    def probes(self, count: int) -> np.ndarray:
        # points just inside both edge rays, where growth shows up first
        rho = _log_radius((np.arange(count // 2) + 0.5) / (count // 2), float(self.radius))
        t = 1 - 1e-9
        rays = [self._c - self._eps * t, self._c + self._eps * t]
        return np.concatenate([rho * np.exp(1j * a) for a in rays])

    def to_json(self):
        return {"kind": self.kind, "center": self.center.to_json(),
                "half_amplitude_pi": str(self.half_amplitude), "radius": str(self.radius)}


@dataclass(frozen=True)
class BallComplement(RegionSpec):
    """``{Re(c/z) < A}`` in closed form: outside the closed disk through 0 of
    diameter ``|c|/A`` in direction ``arg c``, cut to ``|z| < radius``."""

    c: QI
    A: Fraction
    radius: Fraction = Fraction(1)

    kind = "BallComplement"

    def __post_init__(self):
        object.__setattr__(self, "c", QI.coerce(self.c))
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if not self.c or self.A <= 0 or self.radius <= 0:
            raise ValueError("need c != 0, A > 0 and radius > 0")

    @classmethod
    def from_phi(cls, phi: ExpPolynomial, A, radius=1) -> "BallComplement":
        if phi.ram_index != 1 or phi.pole_order != 1 or len(phi.coeffs) != 1:
            raise ValueError("BallComplement needs phi of the form c/z")
        return cls(phi.leading_coefficient, Fraction(A), Fraction(radius))

    @property
    def disk(self) -> tuple[complex, float]:
        cc = complex(self.c)
        rad = abs(cc) / (2 * float(self.A))
        return rad * cc / abs(cc), rad

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        center, rad = self.disk
        return (np.abs(z - center) > rad) & (np.abs(z) < float(self.radius)) & (z != 0)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        center, rad = self.disk
        return np.minimum(np.abs(z - center) - rad, float(self.radius) - np.abs(z))

    def bounding_radius(self):
        return float(self.radius)

    def to_json(self):
        return {"kind": self.kind, "c": str(self.c), "A": str(self.A), "radius": str(self.radius)}


@dataclass(frozen=True)
class ParabolicU1(RegionSpec):
    """``{|x| < 1, sqrt(|x| - x^2) < y < 1}``, optionally scaled and rotated.

    The lower boundary is made of the upper halves of the circles of radius 1/2
    centred at (+-1/2, 0), so distances are in closed form.
    """

    scale: float = 1.0
    rotation: float = 0.0

    kind = "ParabolicU1"
    _flip = 1.0

    def _to_model(self, z):
        return np.asarray(z, dtype=complex) * np.exp(-1j * self.rotation) / self.scale * self._flip

    def _from_model(self, p):
        return p * self._flip * self.scale * np.exp(1j * self.rotation)

    @staticmethod
    def model_contains(p):
        x, y = p.real, p.imag
        ax = np.abs(x)
        return (ax < 1) & (y < 1) & (y > np.sqrt(np.maximum(ax - x * x, 0)))

    @staticmethod
    def model_distance(p):
        x, y = p.real, p.imag
        d_top = 1 - y
        d_side = 1 - np.abs(x)
        d_l = np.abs(np.abs(p - 0.5) - 0.5)
        d_r = np.abs(np.abs(p + 0.5) - 0.5)
        return np.minimum(np.minimum(d_top, d_side), np.minimum(d_l, d_r))

    @staticmethod
    def model_propose(u):
        """Log-stratified height, uniform over the admissible x-set at that height."""
        y = _log_radius(u[:, 0], 1.0)
        disc = np.sqrt(np.clip(1 - 4 * y * y, 0, None))
        x1 = np.where(y < 0.5, (1 - disc) / 2, 1.0)
        x2 = np.where(y < 0.5, (1 + disc) / 2, 1.0)
        half = x1 + (1 - x2)
        t = (2 * u[:, 1] - 1) * half
        s = np.sign(t)
        a = np.abs(t)
        ax = np.where(a < x1, a, x2 + (a - x1))
        return s * ax + 1j * y

    def contains(self, z):
        return self.model_contains(self._to_model(z))

    def boundary_distance(self, z):
        return self.scale * self.model_distance(self._to_model(z))

    def bounding_radius(self):
        return math.sqrt(2) * self.scale

    def propose(self, u):
        return self._from_model(self.model_propose(u))

    def to_json(self):
        return {"kind": self.kind, "scale": self.scale, "rotation": self.rotation}


@dataclass(frozen=True)
class ParabolicU2(ParabolicU1):
    """Mirror image of U1 in the real axis (equivalently its rotation by pi)."""

    kind = "ParabolicU2"
    _flip = -1.0


@dataclass(frozen=True)
class Polygon(RegionSpec):
    vertices: tuple[complex, ...]

    kind = "Polygon"

    def __post_init__(self):
        v = tuple(complex(p) for p in self.vertices)
        if len(v) < 3:
            raise ValueError("polygon needs at least three vertices")
        object.__setattr__(self, "vertices", v)

    @cached_property
    def _edges(self):
        v = np.array(self.vertices)
        w = np.roll(v, -1)
        return v, w

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        a, b = self._edges
        x, y = z.real[:, None], z.imag[:, None]
        ya, yb = a.imag[None, :], b.imag[None, :]
        xa, xb = a.real[None, :], b.real[None, :]
        crosses = (ya > y) != (yb > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = xa + (y - ya) * (xb - xa) / (yb - ya)
        inside = np.count_nonzero(crosses & (x < xint), axis=1) % 2 == 1
        return inside & (self.boundary_distance(z) > 0)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        a, b = self._edges
        return kernels.polyline_min_dist(z.real, z.imag, a.real, a.imag, b.real, b.imag)

    def bounding_radius(self):
        return max(abs(p) for p in self.vertices)

    def propose(self, u):
        a, _ = self._edges
        lo = complex(a.real.min(), a.imag.min())
        hi = complex(a.real.max(), a.imag.max())
        box = lo.real + (hi.real - lo.real) * u[:, 0] + 1j * (lo.imag + (hi.imag - lo.imag) * u[:, 1])
        polar = super().propose(u[:, ::-1])
        return np.where(np.arange(u.shape[0]) % 2 == 0, box, polar)

    def to_json(self):
        return {"kind": self.kind, "vertices": [[p.real, p.imag] for p in self.vertices]}


# --------------------------------------------------------------------------

def _coeff_array(phi) -> np.ndarray:
    if isinstance(phi, ExpPolynomial):
        if phi.ram_index != 1:
            raise ValueError("numeric regions need an unramified phi")
        return phi.coeff_array()
    arr = np.asarray(phi, dtype=complex)
    # numeric list a_1..a_n
    return np.concatenate([[0], arr])


def _phi_label(phi) -> str:
    if isinstance(phi, ExpPolynomial):
        return format_exppoly(phi)
    return repr([complex(c) for c in phi])


@dataclass(frozen=True, eq=False)
class Sublevel(RegionSpec):
    """``{0 < |z| < radius, Re phi(z) < A}``.

    The boundary is traced once on a log-polar grid (marching squares) and
    distances are taken to that polyline, scaled by :data:`DISTANCE_SAFETY`.
    """

    phi: object
    A: Fraction
    radius: Fraction = Fraction(1)
    grid: tuple[int, int] = (480, 960)

    kind = "Sublevel"

    def __post_init__(self):
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "radius", Fraction(self.radius))

    @cached_property
    def coeffs(self) -> np.ndarray:
        return _coeff_array(self.phi)

    def re_phi(self, z):
        return kernels.re_laurent(self.coeffs, np.asarray(z, dtype=complex))

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        a = np.abs(z)
        ok = (a > 0) & (a < float(self.radius))
        out = np.zeros(z.shape, dtype=bool)
        if ok.any():
            out[ok] = self.re_phi(z[ok]) < float(self.A)
        return out

    @cached_property
    def _segments(self):
        from skimage import measure

        r = float(self.radius)
        nu, nt = self.grid
        umin = math.log(r * RADIAL_FLOOR * 0.1)
        us = np.linspace(umin, math.log(r), nu)
        ts = np.linspace(0, 2 * np.pi, nt + 1)
        zz = np.exp(us)[:, None] * np.exp(1j * ts)[None, :]
        g = self.re_phi(zz.ravel()).reshape(zz.shape) - float(self.A)
        # asinh keeps the zero set and tames the dynamic range for interpolation
        g = np.arcsinh(g)
        segs = []
        for contour in measure.find_contours(g, 0.0):
            ui = np.interp(contour[:, 0], np.arange(nu), us)
            ti = np.interp(contour[:, 1], np.arange(nt + 1), ts)
            pts = np.exp(ui) * np.exp(1j * ti)
            segs.append((pts[:-1], pts[1:]))
        circ = r * np.exp(1j * np.linspace(0, 2 * np.pi, 2049))
        segs.append((circ[:-1], circ[1:]))
        a = np.concatenate([s[0] for s in segs])
        b = np.concatenate([s[1] for s in segs])
        return a, b

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        a, b = self._segments
        d = kernels.polyline_min_dist(z.real, z.imag, a.real, a.imag, b.real, b.imag)
        # the origin is always a boundary point
        return DISTANCE_SAFETY * np.minimum(d, np.abs(z))

    def bounding_radius(self):
        return float(self.radius)

    def to_json(self):
        return {"kind": self.kind, "phi": _phi_label(self.phi), "A": str(self.A),
                "radius": str(self.radius)}


@dataclass(frozen=True, eq=False)
class EtaImage(RegionSpec):
    """Image under the truncated normalizing map of a parabolic model wedge.

    ``v`` ranges over the branch of ``{v : v^n in scale*U}`` around the
    direction ``(pi/2 + k*pi)/n`` (``U`` = U1 for even ``k``, U2 for odd),
    and the region is ``eta(v) = v*sigma(v)`` truncated at ``order``. On it
    ``phi`` equals ``v^-n`` up to the truncation error, so ``exp(+-phi)``
    stay bounded.
    """

    phi: ExpPolynomial
    stokes_index: int
    scale: float | None = None
    order: int = 16

    kind = "EtaImage"

    def __post_init__(self):
        if self.phi.is_zero() or self.phi.ram_index != 1:
            raise ValueError("EtaImage needs a nonzero unramified phi")
        n = self.phi.pole_order
        if not 0 <= self.stokes_index < 2 * n:
            raise ValueError("stokes index out of range")
        if self.scale is None:
            object.__setattr__(self, "scale", self.default_scale())

    @cached_property
    def sigma(self) -> np.ndarray:
        from .puiseux import sigma_solve

        return sigma_solve(self.phi, self.order).to_complex()

    @cached_property
    def eta_coeffs(self) -> np.ndarray:
        return np.concatenate([[0], self.sigma])

    @property
    def n(self) -> int:
        return self.phi.pole_order

    @property
    def beta(self) -> float:
        return (math.pi / 2 + self.stokes_index * math.pi) / self.n

    @cached_property
    def valid_radius(self) -> float:
        """Largest |v| where the truncation tail stays below 10% of the wedge width
        and eta' stays within half of sigma(0) of sigma(0)."""
        s = self.sigma
        s0 = abs(s[0])
        ratios = [(abs(s[k]) / s0) ** (1.0 / k) for k in range(1, len(s)) if s[k] != 0]
        if not ratios:
            return math.inf
        R = 1.0 / max(ratios)
        n, N = self.n, self.order

        def ok(rho):
            q = rho / R
            if q >= 0.5:
                return False
            tail = q ** (N + 1) / (1 - q)
            if tail > 0.2 * rho ** n / n:
                return False
            deriv = sum((k + 1) * abs(s[k]) * rho ** k for k in range(1, len(s)))
            return deriv < 0.5 * s0

        lo, hi = 0.0, 0.5 * R
        if ok(hi):
            return hi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        return lo

    def default_scale(self) -> float:
        rv = self.valid_radius
        if math.isinf(rv):
            return 1.0
        # |w| <= sqrt(2)*scale on the model, |v| = |w|^(1/n)
        return min(1.0, rv ** self.n / math.sqrt(2))

    @property
    def _model(self) -> ParabolicU1:
        cls = ParabolicU1 if self.stokes_index % 2 == 0 else ParabolicU2
        return cls(scale=self.scale)

    def _branch_root(self, w):
        """The n-th root of w lying in the wedge around beta."""
        n = self.n
        ang = np.angle(w)
        base = ang / n
        k = np.round((self.beta - base) / (2 * np.pi / n))
        return np.abs(w) ** (1.0 / n) * np.exp(1j * (base + 2 * np.pi * k / n))

    def eta(self, v):
        return np.polyval(self.eta_coeffs[::-1], v)

    def eta_prime(self, v):
        c = self.eta_coeffs
        return np.polyval((c[1:] * np.arange(1, len(c)))[::-1], v)

    def invert(self, z):
        z = np.asarray(z, dtype=complex)
        v0 = z / self.sigma[0]
        return kernels.eta_invert(z, self.eta_coeffs, v0)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        v, conv = self.invert(z)
        n = self.n
        in_wedge = np.abs(_wrap(np.angle(v) - self.beta)) < math.pi / (2 * n)
        in_radius = np.abs(v) < min(self.valid_radius, 1e300)
        w = v ** n
        return conv & in_wedge & in_radius & self._model.contains(w) & (z != 0)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        v, _ = self.invert(z)
        n = self.n
        w = v ** n
        dw = self._model.boundary_distance(w)
        dv = dw / (n * np.abs(v) ** (n - 1))
        return DISTANCE_SAFETY * np.abs(self.eta_prime(v)) * dv

    def bounding_radius(self):
        vmax = (math.sqrt(2) * self.scale) ** (1.0 / self.n)
        return float(np.max(np.abs(self.eta(vmax * np.exp(1j * np.linspace(0, 2 * np.pi, 64))))))

    def propose(self, u):
        w = self._model.propose(u)
        return self.eta(self._branch_root(w))

    def stokes_direction(self) -> float:
        return math.atan2(self.sigma[0].imag, self.sigma[0].real) + self.beta

    def to_json(self):
        return {"kind": self.kind, "phi": format_exppoly(self.phi),
                "stokes_index": self.stokes_index, "scale": self.scale, "order": self.order,
                "direction_rad": self.stokes_direction()}
