"""Acceptance criteria, one test per criterion.

Each test is named ``test_criterion_<k>_...``; the conftest hook prints one
PASS/FAIL line per criterion at the end of the run. Run alone with
``pytest tests/test_acceptance.py -v``.
"""

import cmath
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from tempgrowth.angles import AngleExpr
from tempgrowth.exppoly import ExpPolynomial, positive_proportionality
from tempgrowth.gaussian import QI
from tempgrowth.growth import (
    Direction,
    Verdict,
    classify_direction,
    distinguishing_witness,
    sector_verdict,
    stokes_directions,
    support_arcs,
)
from tempgrowth.linalg import determinant, inverse, matmul
from tempgrowth.models import (
    GoodModel,
    OperatorSpec,
    RegularPart,
    fully_faithful_check,
    newton_polygon_katz,
    regular_iso,
    tempered_iso_good_models,
    tempered_iso_twisted,
)
from tempgrowth.oracle import oracle_verdict
from tempgrowth.puiseux import eta_residual, sigma_solve, PowerSeries
from tempgrowth.regions import BallComplement, ParabolicU1, ParabolicU2, Sector, Sublevel

from conftest import P
from oracles import brute_force_conjugate, qi_matrix

pytestmark = pytest.mark.acceptance

F = Fraction


def gaussian_coef(rng: random.Random, bound: int = 8, max_norm=None) -> QI:
    while True:
        c = QI(F(rng.randint(-bound, bound), rng.randint(1, bound)),
               F(rng.randint(-bound, bound), rng.randint(1, bound)))
        if c and (max_norm is None or c.norm() <= max_norm):
            return c


def random_phi(rng: random.Random, max_pole: int, density: float = 0.6, **kw) -> ExpPolynomial:
    n = rng.randint(1, max_pole)
    terms = {n: gaussian_coef(rng, **kw)}
    for j in range(1, n):
        if rng.random() < density:
            terms[j] = gaussian_coef(rng, **kw)
    return ExpPolynomial.from_terms(terms, 1)


def test_criterion_1_arc_structure():
    rng = random.Random(1)
    start = time.perf_counter()
    for _ in range(200):
        phi = random_phi(rng, 6)
        n = phi.pole_order
        arcs = support_arcs(phi)
        assert len(arcs) == n
        for a in arcs:
            length = a.length_over_pi()
            assert isinstance(length, Fraction) and length == Fraction(1, n)
        stokes = stokes_directions(phi)
        assert len(stokes) == 2 * n
        ends = sorted([a.start.rad for a in arcs] + [a.end.rad % (2 * math.pi) for a in arcs])
        assert np.allclose(ends, sorted(s.rad for s in stokes), atol=1e-12)
    elapsed = time.perf_counter() - start
    assert elapsed < 5, f"{elapsed:.2f}s"


def test_criterion_2_proportionality_law():
    rng = random.Random(2)
    start = time.perf_counter()
    counts = {"proportional": 0, "same_leading": 0, "generic": 0}
    for i in range(200):
        p1 = random_phi(rng, 4)
        kind = ("proportional", "same_leading", "generic")[i % 3]
        if kind == "proportional":
            p2 = p1.scale(F(rng.randint(1, 9), rng.randint(1, 9)))
        elif kind == "same_leading":
            lower = random_phi(rng, max(p1.pole_order - 1, 1)) if p1.pole_order > 1 else ExpPolynomial.zero()
            terms = {p1.pole_order: p1.leading_coefficient}
            terms.update({j: c for j, c in lower.coeffs if j < p1.pole_order})
            p2 = ExpPolynomial.from_terms(terms, 1)
            if p2 == p1:
                p2 = p1 + ExpPolynomial.monomial(QI(1), 1) if p1.pole_order > 1 else p1.scale(2)
        else:
            p2 = random_phi(rng, 4)
        w = distinguishing_witness(p1, p2)
        if positive_proportionality(p1, p2) is not None:
            assert w is None
            counts["proportional"] += 1
            continue
        assert w is not None
        if w.kind == "leading":
            assert classify_direction(w.tempered_fn, w.direction) is Direction.Decay
            assert classify_direction(w.growth_fn, w.direction) is Direction.Growth
        else:
            assert classify_direction(w.growth_fn, w.direction) is Direction.Growth
        same = p1.pole_order == p2.pole_order and (
            positive_proportionality(ExpPolynomial.monomial(p1.leading_coefficient, 1),
                                     ExpPolynomial.monomial(p2.leading_coefficient, 1)) is not None)
        if same:
            assert w.kind == "grid"
            counts["same_leading"] += 1
        else:
            counts["generic"] += 1
    elapsed = time.perf_counter() - start
    assert min(counts.values()) >= 30, counts
    assert elapsed < 30, f"{elapsed:.2f}s"


def test_criterion_3_parabolic_sets():
    start = time.perf_counter()
    for text in ("1/z", "-1/z"):
        for region in (ParabolicU1(), ParabolicU2()):
            ms = []
            for seed in range(3):
                rep = oracle_verdict(P(text), region, budget=10_000, seed=seed)
                assert rep.verdict is Verdict.Tempered, (text, region.kind, rep.diagnostics)
                ms += [rep.fit.fitted_M, rep.fit_alt.fitted_M]
            assert max(ms) - min(ms) < 0.5
    rep = oracle_verdict(P("1/z"), Sector(AngleExpr.from_pi(0), F(1, 4), F(1, 2)), budget=10_000)
    assert rep.verdict is Verdict.NotTempered
    elapsed = time.perf_counter() - start
    assert elapsed < 20, f"{elapsed:.2f}s"


@pytest.mark.parametrize("A", [F(1, 2), F(1), F(2)])
def test_criterion_4_ball_complement(A):
    rng = np.random.default_rng(4)
    r = np.sqrt(rng.random(10_000))
    z = r * np.exp(2j * np.pi * rng.random(10_000))
    phi = P("1/z")
    disagree = np.count_nonzero(Sublevel(phi, A).contains(z) != BallComplement.from_phi(phi, A).contains(z))
    assert disagree == 0


def test_criterion_5_puiseux_contract():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(1, 4)
        # c^n has the exact principal root c only when -pi/n < arg c <= pi/n
        root = gaussian_coef(rng, bound=3)
        while not -math.pi / n < cmath.phase(complex(root)) <= math.pi / n:
            root = gaussian_coef(rng, bound=3)
        terms = {n: root ** n}
        for j in range(1, n):
            if rng.random() < 0.6:
                terms[j] = gaussian_coef(rng)
        phi = ExpPolynomial.from_terms(terms, 1)
        assert isinstance(sigma_solve(phi, 0)[0], QI)
        assert eta_residual(phi, 16) >= 13
    worked = sigma_solve(P("1/z^2 + 1/z"), 2)
    assert worked == PowerSeries.from_list([1, F(1, 2), F(1, 8)], 2)


def _random_regular(rng: random.Random, rank: int) -> RegularPart:
    while True:
        m = [[QI(rng.randint(-2, 2)) for _ in range(rank)] for _ in range(rank)]
        if rng.random() < 0.4:
            m = [[QI(1) if i == j else (QI(rng.randint(0, 1)) if j == i + 1 else QI(0))
                  for j in range(rank)] for i in range(rank)]
        if determinant(m):
            return RegularPart(rank, tuple(tuple(r) for r in m))


def _random_model(rng: random.Random, rays: list) -> GoodModel:
    terms = {}
    for ray in rng.sample(rays, rng.randint(1, len(rays))):
        for _ in range(rng.randint(1, 2)):
            phi = ray.scale(F(rng.randint(1, 3), rng.randint(1, 2)))
            terms[phi] = _random_regular(rng, rng.randint(1, 3))
    return GoodModel(1, tuple(terms.items()))


def test_criterion_6_fully_faithful():
    rng = random.Random(6)
    start = time.perf_counter()
    for _ in range(100):
        rays = []
        while len(rays) < 3:
            phi = random_phi(rng, 3) if rng.random() < 0.85 else ExpPolynomial.zero()
            if all(positive_proportionality(phi, r) is None for r in rays):
                rays.append(phi)
        m1, m2 = _random_model(rng, rays), _random_model(rng, rays)
        k = int(max(m1.katz, m2.katz)) + 1
        omega = ExpPolynomial.from_terms({k + rng.randint(0, 1): gaussian_coef(rng), 1: QI(1)}, 1)
        res = fully_faithful_check(m1, m2, omega)
        assert res.equal, (m1, m2, omega, res)
    elapsed = time.perf_counter() - start
    assert elapsed < 60, f"{elapsed:.2f}s"


def test_criterion_7_classification():
    I1, I2, J2 = RegularPart.identity(1), RegularPart.identity(2), RegularPart.jordan(1, 2)
    G = GoodModel.of
    assert tempered_iso_good_models(G(("1/z", I1)), G(("2/z", I1)))
    assert tempered_iso_good_models(G(("1/z", I1), ("2/z", I1)), G(("1/z", I2)))
    assert not tempered_iso_good_models(G(("1/z", I1)), G(("i/z", I1)))
    d = tempered_iso_twisted(G(("1/z", I1)), G(("2/z", I1)), P("1/z^3"), 2)
    assert not d and d.failing_condition == "graded_stalk"
    d = tempered_iso_twisted(G(("1/z", I2)), G(("1/z", J2)), P("1/z^3"), 2)
    assert not d and d.failing_condition == "local_system"

    rng = random.Random(7)
    agree = 0
    for i in range(50):
        def mat():
            while True:
                m = qi_matrix([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
                if determinant(m):
                    return m
        t1 = mat()
        if i % 2 == 0:
            g = mat()
            t2 = matmul(matmul(g, t1), inverse(g))
        else:
            t2 = mat()
        ours = regular_iso(RegularPart.from_matrix(t1), RegularPart.from_matrix(t2))
        # grid {0,1,2} is exhaustive for 2x2: det X is of degree <= 2 in each coefficient
        brute = brute_force_conjugate(t1, t2) is not None
        agree += ours == brute
    assert agree == 50


def test_criterion_8_oracle_concordance():
    rng = random.Random(8)
    start = time.perf_counter()
    agree = total = 0
    misses = []
    while total < 100:
        phi = random_phi(rng, 4, max_norm=16)
        s = Sector(AngleExpr.from_pi(F(rng.randint(0, 47), 24)), F(rng.randint(1, 8), 24), F(1, 2))
        analytic = sector_verdict(phi, s)
        if analytic is Verdict.Boundary:
            continue
        verdict = oracle_verdict(phi, s, budget=10_000, seed=total).verdict
        total += 1
        if verdict is analytic:
            agree += 1
        else:
            misses.append((str(phi), str(s.center), s.half_amplitude, analytic.value, verdict.value))
    elapsed = time.perf_counter() - start
    assert agree >= 98, misses
    assert elapsed < 120, f"{elapsed:.2f}s"


def test_criterion_9_newton_polygon():
    assert newton_polygon_katz(OperatorSpec(1, {1: 1, 0: 0})) == 0
    assert newton_polygon_katz(OperatorSpec(1, {1: 2, 0: 0})) == 1
    assert newton_polygon_katz(OperatorSpec(1, {1: 3, 0: 0})) == 2
