"""Good models ``sum L^phi (x) R_phi`` and decisions about their tempered solutions.

A regular part is carried by its monodromy matrix over Q(i). A term
``(phi, R)`` with ramified ``phi`` (index ``l_phi``) stands for the whole
Galois orbit of ``phi``; its solutions form a local system of rank
``l_phi * rank(R)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .exppoly import (
    ExpPolynomial,
    format_exppoly,
    katz_slope,
    parse_exppoly,
    positive_proportionality,
    twist_add,
)
from .gaussian import QI, parse_qi
from .linalg import Matrix, block_diag, determinant, identity, intertwiner_dim, rational_canonical_form, similar, zeros

__all__ = [
    "SchemaError",
    "RegularPart",
    "GoodModel",
    "OperatorSpec",
    "RayClass",
    "IsoDecision",
    "FullyFaithfulResult",
    "regular_hom_dim",
    "regular_iso",
    "tempered_hom_dim",
    "ray_partition",
    "tempered_iso_good_models",
    "fully_faithful_check",
    "graded_stalk_equal",
    "underlying_local_system",
    "tempered_iso_twisted",
    "newton_polygon_katz",
    "rank_one_operator",
]


class SchemaError(ValueError):
    """A good-model document does not match the expected JSON layout."""


# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegularPart:
    """Rank and invertible monodromy matrix."""

    rank: int
    monodromy: tuple[tuple[QI, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(QI.coerce(x) for x in row) for row in self.monodromy)
        if self.rank < 1 or len(m) != self.rank or any(len(r) != self.rank for r in m):
            raise ValueError(f"monodromy must be a {self.rank}x{self.rank} matrix")
        if not determinant([list(r) for r in m]):
            raise ValueError("monodromy must be invertible")
        object.__setattr__(self, "monodromy", m)

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence]) -> "RegularPart":
        return cls(len(rows), tuple(tuple(QI.coerce(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, rank: int = 1) -> "RegularPart":
        return cls.from_matrix(identity(rank))

    @classmethod
    def scalar(cls, c, rank: int = 1) -> "RegularPart":
        c = QI.coerce(c)
        return cls.from_matrix([[c if i == j else QI(0) for j in range(rank)] for i in range(rank)])

    @classmethod
    def jordan(cls, eigenvalue, size: int) -> "RegularPart":
        e = QI.coerce(eigenvalue)
        rows = [[e if i == j else (QI(1) if j == i + 1 else QI(0)) for j in range(size)]
                for i in range(size)]
        return cls.from_matrix(rows)

    @property
    def matrix(self) -> Matrix:
        return [list(r) for r in self.monodromy]

    def __eq__(self, other):
        return isinstance(other, RegularPart) and self.monodromy == other.monodromy

    def __hash__(self):
        return hash(self.monodromy)

    def to_json(self) -> list[list[str]]:
        return [[x.matrix_entry() for x in row] for row in self.monodromy]


def _direct_sum(parts: Iterable[RegularPart]) -> RegularPart:
    return RegularPart.from_matrix(block_diag([p.matrix for p in parts]))


@dataclass(frozen=True)
class GoodModel:
    ram_index: int
    terms: tuple[tuple[ExpPolynomial, RegularPart], ...]

    def __post_init__(self):
        if self.ram_index < 1:
            raise ValueError("ramification index must be positive")
        terms = tuple((phi, reg) for phi, reg in self.terms)
        seen = set()
        for phi, _ in terms:
            if self.ram_index % phi.ram_index:
                raise ValueError(f"ramification of {format_exppoly(phi)} does not divide l={self.ram_index}")
            if phi in seen:
                raise ValueError(f"exponent {format_exppoly(phi)} listed twice")
            seen.add(phi)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms: tuple, l: int | None = None) -> "GoodModel":
        """Convenience: ``GoodModel.of(("1/z", RegularPart.identity()), ...)``."""
        out = []
        for phi, reg in terms:
            out.append((parse_exppoly(phi) if isinstance(phi, str) else phi, reg))
        if l is None:
            l = 1
            for phi, _ in out:
                l = l * phi.ram_index // _gcd(l, phi.ram_index)
        return cls(l, tuple(out))

    @property
    def katz(self) -> Fraction:
        return max((katz_slope(phi) for phi, _ in self.terms), default=Fraction(0))

    @property
    def rank(self) -> int:
        return sum(phi.ram_index * reg.rank for phi, reg in self.terms)

    def is_unramified(self) -> bool:
        return self.ram_index == 1 and all(phi.ram_index == 1 for phi, _ in self.terms)

    def to_json(self) -> dict:
        return {"l": self.ram_index,
                "terms": [{"phi": format_exppoly(phi), "rank": reg.rank, "monodromy": reg.to_json()}
                          for phi, reg in self.terms]}

    @classmethod
    def from_json(cls, data: Any) -> "GoodModel":
        if not isinstance(data, Mapping):
            raise SchemaError("top level must be an object")
        l = data.get("l", 1)
        if not isinstance(l, int) or isinstance(l, bool) or l < 1:
            raise SchemaError("'l' must be a positive integer")
        terms = data.get("terms")
        if not isinstance(terms, list):
            raise SchemaError("'terms' must be a list")
        out = []
        for i, t in enumerate(terms):
            where = f"terms[{i}]"
            if not isinstance(t, Mapping):
                raise SchemaError(f"{where} must be an object")
            missing = {"phi", "rank", "monodromy"} - set(t)
            if missing:
                raise SchemaError(f"{where} is missing {sorted(missing)}")
            if not isinstance(t["phi"], str):
                raise SchemaError(f"{where}.phi must be a string")
            try:
                phi = parse_exppoly(t["phi"]) if t["phi"].strip() != "0" else ExpPolynomial.zero()
            except ValueError as exc:
                raise SchemaError(f"{where}.phi: {exc}") from exc
            rank = t["rank"]
            if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
                raise SchemaError(f"{where}.rank must be a positive integer")
            mono = t["monodromy"]
            if (not isinstance(mono, list) or len(mono) != rank
                    or any(not isinstance(r, list) or len(r) != rank for r in mono)):
                raise SchemaError(f"{where}.monodromy must be a {rank}x{rank} array")
            try:
                rows = [[parse_qi(str(x)) for x in r] for r in mono]
                reg = RegularPart(rank, tuple(tuple(r) for r in rows))
            except ValueError as exc:
                raise SchemaError(f"{where}.monodromy: {exc}") from exc
            out.append((phi, reg))
        try:
            return cls(l, tuple(out))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "GoodModel":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_json(data)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class OperatorSpec:
    """``sum_j a_j(z) d^j`` recorded by the valuations ``v(a_j)`` (None for a_j = 0)."""

    order: int
    coeff_valuations: Mapping[int, int | None]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("operator order must be positive")
        if self.coeff_valuations.get(self.order) is None:
            raise ValueError("the leading coefficient must be nonzero")
        if any(j < 0 or j > self.order for j in self.coeff_valuations):
            raise ValueError("coefficient index out of range")


# --------------------------------------------------------------------------

def regular_hom_dim(r1: RegularPart, r2: RegularPart) -> int:
    """``dim {X : T2 X = X T1}``."""
    return intertwiner_dim(r1.matrix, r2.matrix)


def regular_iso(r1: RegularPart, r2: RegularPart) -> bool:
    """Similarity over Q(i) via rational canonical forms."""
    return r1.rank == r2.rank and similar(r1.matrix, r2.matrix)


def tempered_hom_dim(phi1: ExpPolynomial, r1: RegularPart, phi2: ExpPolynomial, r2: RegularPart) -> int:
    z1, z2 = phi1.is_zero(), phi2.is_zero()
    if z1 != z2:
        return 0
    if z1 or positive_proportionality(phi1, phi2) is not None:
        return regular_hom_dim(r1, r2)
    return 0


@dataclass(frozen=True)
class RayClass:
    representative: ExpPolynomial
    members: tuple[int, ...]


def ray_partition(model: GoodModel) -> list[RayClass]:
    """Group term indices by positive proportionality; the zero exponent is its own class."""
    classes: list[tuple[ExpPolynomial, list[int]]] = []
    for i, (phi, _) in enumerate(model.terms):
        for rep, members in classes:
            if rep.is_zero() and phi.is_zero():
                members.append(i)
                break
            if not rep.is_zero() and not phi.is_zero() and positive_proportionality(rep, phi) is not None:
                members.append(i)
                break
        else:
            classes.append((phi, [i]))
    return [RayClass(rep, tuple(m)) for rep, m in classes]


@dataclass(frozen=True)
class IsoDecision:
    isomorphic: bool
    failing_condition: str | None = None
    certificate: dict = field(default_factory=dict)

    def __bool__(self):
        return self.isomorphic

    def to_json(self) -> dict:
        out = {"isomorphic": self.isomorphic}
        if self.failing_condition is not None:
            out["first_failing_condition"] = self.failing_condition
        if self.certificate:
            out["certificate"] = self.certificate
        return out


def _require_unramified(*models: GoodModel):
    for m in models:
        if not m.is_unramified():
            raise ValueError("this decision is implemented for unramified good models (l = 1)")


def tempered_iso_good_models(m1: GoodModel, m2: GoodModel) -> IsoDecision:
    """Same rays, and per ray similar direct sums of regular parts."""
    _require_unramified(m1, m2)
    c1, c2 = ray_partition(m1), ray_partition(m2)
    matching = []
    used: set[int] = set()
    for cls in c1:
        partner = None
        for k, other in enumerate(c2):
            if k in used:
                continue
            a, b = cls.representative, other.representative
            if a.is_zero() and b.is_zero():
                partner, lam = k, Fraction(1)
                break
            if not a.is_zero() and not b.is_zero():
                lam = positive_proportionality(b, a)
                if lam is not None:
                    partner = k
                    break
        if partner is None:
            return IsoDecision(False, "rays", {"unmatched_ray": format_exppoly(cls.representative)})
        used.add(partner)
        matching.append((cls, c2[partner], lam))
    if len(used) != len(c2):
        extra = [format_exppoly(c2[k].representative) for k in range(len(c2)) if k not in used]
        return IsoDecision(False, "rays", {"unmatched_ray": extra[0]})
    cert = []
    for a, b, lam in matching:
        s1 = _direct_sum(m1.terms[i][1] for i in a.members)
        s2 = _direct_sum(m2.terms[i][1] for i in b.members)
        entry = {"ray": format_exppoly(a.representative), "matched": format_exppoly(b.representative),
                 "lambda": str(lam), "rank": s1.rank}
        if not regular_iso(s1, s2):
            return IsoDecision(False, "regular_parts", {"ray": entry})
        cert.append(entry)
    return IsoDecision(True, None, {"ray_matching": cert})


@dataclass(frozen=True)
class FullyFaithfulResult:
    lhs: int
    rhs: int
    equal: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.equal))


def fully_faithful_check(m1: GoodModel, m2: GoodModel, omega: ExpPolynomial) -> FullyFaithfulResult:
    """Tempered Hom after twisting by omega versus the formal Hom of the models."""
    _require_unramified(m1, m2)
    k_min = int(max(m1.katz, m2.katz)) + 1
    if katz_slope(omega) < k_min:
        raise ValueError(
            f"pole order of omega ({katz_slope(omega)}) must be >= k > katz invariants "
            f"({m1.katz}, {m2.katz}); smallest admissible k is {k_min}")
    lhs = 0
    for phi, r in m1.terms:
        for psi, p in m2.terms:
            lhs += tempered_hom_dim(twist_add(phi, omega), r, twist_add(psi, omega), p)
    rhs = 0
    for phi, r in m1.terms:
        for psi, p in m2.terms:
            if phi == psi:
                rhs += regular_hom_dim(r, p)
    return FullyFaithfulResult(lhs, rhs, lhs == rhs)


def _galois_conjugates(phi: ExpPolynomial) -> list[ExpPolynomial]:
    """Conjugates ``z^(1/l) -> e^(2 pi i k/l) z^(1/l)`` that stay over Q(i)."""
    l = phi.ram_index
    units = [QI(1), QI(0, 1), QI(-1), QI(0, -1)]
    out = []
    for k in range(l):
        terms = {}
        for j, a in phi.coeffs:
            q = Fraction(4 * j * k, l)
            if q.denominator != 1:
                break
            terms[j] = a * units[int(q) % 4]
        else:
            out.append(ExpPolynomial.from_terms(terms, l))
    return out


def _same_orbit(phi: ExpPolynomial, psi: ExpPolynomial) -> bool:
    if phi.ram_index != psi.ram_index:
        return False
    return any(c == psi for c in _galois_conjugates(phi))


def graded_stalk_equal(m1: GoodModel, m2: GoodModel) -> bool:
    """Equality of the multisets ``{(phi, rank)}`` (phi up to Galois conjugation)."""
    pool = [(phi, reg.rank) for phi, reg in m2.terms]
    for phi, reg in m1.terms:
        for i, (psi, r) in enumerate(pool):
            if r == reg.rank and _same_orbit(phi, psi):
                del pool[i]
                break
        else:
            return False
    return not pool


def _induced_block(phi: ExpPolynomial, reg: RegularPart) -> Matrix:
    l, r = phi.ram_index, reg.rank
    if l == 1:
        return reg.matrix
    m = zeros(l * r, l * r)
    # determination h goes to h+1; the last one returns twisted by the monodromy
    for h in range(l - 1):
        for i in range(r):
            m[(h + 1) * r + i][h * r + i] = QI(1)
    for i in range(r):
        for j in range(r):
            m[i][(l - 1) * r + j] = reg.monodromy[i][j]
    return m


def underlying_local_system(model: GoodModel) -> RegularPart:
    """Monodromy of the solution local system; ramified terms give the induced
    (block cyclic) representation in determination-major order."""
    if not model.terms:
        raise ValueError("empty model has no local system")
    return RegularPart.from_matrix(block_diag([_induced_block(phi, reg) for phi, reg in model.terms]))


def tempered_iso_twisted(m1: GoodModel, m2: GoodModel, omega: ExpPolynomial, k: int) -> IsoDecision:
    """Isomorphism of the omega-twisted tempered solutions: similar local systems
    and equal graded stalks."""
    for name, m in (("first", m1), ("second", m2)):
        if not m.katz < k:
            raise ValueError(f"katz invariant of the {name} model ({m.katz}) must be < k = {k}")
    if not katz_slope(omega) > k:
        raise ValueError(f"pole order of omega ({katz_slope(omega)}) must exceed k = {k}")
    ls1, ls2 = underlying_local_system(m1), underlying_local_system(m2)
    if not regular_iso(ls1, ls2):
        return IsoDecision(False, "local_system", {"ranks": [ls1.rank, ls2.rank]})
    if not graded_stalk_equal(m1, m2):
        return IsoDecision(False, "graded_stalk", {
            "first": sorted(f"{format_exppoly(p)}:{r.rank}" for p, r in m1.terms),
            "second": sorted(f"{format_exppoly(p)}:{r.rank}" for p, r in m2.terms)})
    return IsoDecision(True, None, {"local_system_rank": ls1.rank})


# --------------------------------------------------------------------------

def newton_polygon_katz(op: OperatorSpec) -> Fraction:
    """Largest slope of the Newton polygon seen from the order-m vertex.

    Points are ``(j, j - v(a_j))``; the result is
    ``max(0, max_{j<m} (y_j - y_m)/(m - j))``.
    """
    m = op.order
    ym = m - op.coeff_valuations[m]
    best = Fraction(0)
    for j, v in op.coeff_valuations.items():
        if j == m or v is None:
            continue
        best = max(best, Fraction((j - v) - ym, m - j))
    return best


def rank_one_operator(phi: ExpPolynomial) -> OperatorSpec:
    """Valuations of ``z^(n+1) d - z^(n+1) phi'`` whose solution is ``exp(phi)``."""
    if phi.ram_index != 1:
        raise ValueError("rank-one operator is built for unramified phi")
    n = phi.pole_order
    # z^(n+1) phi' = -sum j a_j z^(n-j), lowest power at j = n
    return OperatorSpec(1, {1: n + 1, 0: 0 if n else None})
