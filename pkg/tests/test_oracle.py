from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tempgrowth.angles import AngleExpr
from tempgrowth.growth import Verdict, concentrated_region, sector_verdict, stokes_directions
from tempgrowth.oracle import (
    EmptyRegionError,
    OracleConfig,
    growth_fit,
    log_abs_exp,
    oracle_verdict,
    sample_region,
)
from tempgrowth.regions import ParabolicU1, ParabolicU2, Polygon, Sector, Sublevel, BallComplement

from conftest import P, exppolys

F = Fraction
pi = AngleExpr.from_pi


def test_sample_region_examples():
    z = sample_region(ParabolicU1(), 100, 7)
    x, y = z.real, z.imag
    assert z.shape == (100,)
    assert np.all((np.sqrt(np.abs(x) - x ** 2) < y) & (y < 1))
    sub = Sublevel(P("1/z"), 1, 1)
    z = sample_region(sub, 100, 7)
    assert np.all((1 / z).real < 1)
    assert np.all(BallComplement.from_phi(P("1/z"), 1).contains(z))


def test_sample_region_is_deterministic_and_origin_biased():
    a = sample_region(ParabolicU1(), 500, 3)
    b = sample_region(ParabolicU1(), 500, 3)
    assert np.array_equal(a, b)
    assert np.mean(np.abs(a) < 0.1) > 0.2


def test_sample_region_empty():
    flat = Polygon((0.1 + 0j, 0.2 + 0j, 0.3 + 0j))
    with pytest.raises(EmptyRegionError):
        sample_region(flat, 10, 0)


def test_log_abs_exp_matches_direct():
    phi = P("(1+2i)/z^3 - 4/z")
    z = np.array([0.3 + 0.4j, -0.7 + 0.1j])
    direct = np.log(np.abs(np.exp([phi.evaluate(w) for w in z])))
    assert np.allclose(log_abs_exp(phi, z), direct)
    assert np.allclose(log_abs_exp(phi, z, threads=2), direct)


def test_growth_fit_constant():
    region = ParabolicU1()
    z = sample_region(region, 2000, 1)
    fit = growth_fit([(p, 1.0) for p in z], region)
    assert fit.fitted_M == pytest.approx(0, abs=0.1)


def test_growth_fit_inverse_distance():
    region = Sector(pi(F(1, 3)), F(1, 6), F(1))
    z = sample_region(region, 2000, 2)
    d = region.boundary_distance(z)
    fit = growth_fit(list(zip(z, 1 / d)), region)
    assert fit.fitted_M == pytest.approx(1, abs=0.1)


def test_growth_fit_exp_on_u1():
    region = ParabolicU1()
    z = sample_region(region, 4000, 3)
    fit = growth_fit(list(zip(z, (1 / z).real)), region, log_values=True)
    assert fit.fitted_M is not None and fit.max_residual < 1.0


def test_growth_fit_needs_samples():
    with pytest.raises(ValueError):
        growth_fit([(0.1 + 0.5j, 1.0)] * 10, ParabolicU1())


@pytest.mark.parametrize("text, region, expected", [
    ("1/z", Sector(pi(1), F(1, 4), F(1, 2)), Verdict.Tempered),
    ("1/z", Sector(pi(0), F(1, 4), F(1, 2)), Verdict.NotTempered),
    ("-1/z", ParabolicU2(), Verdict.Tempered),
    ("1/z", ParabolicU2(), Verdict.Tempered),
    ("1/z^2", Sector(pi(F(1, 2)), F(1, 8), F(1, 2)), Verdict.Tempered),
    ("1/z^2", Sector(pi(0), F(1, 8), F(1, 2)), Verdict.NotTempered),
])
def test_oracle_examples(text, region, expected):
    assert oracle_verdict(P(text), region, 4000).verdict is expected


def test_oracle_on_concentrated_regions():
    for text in ("1/z^2 + 1/z", "1/z^3 - 2/z"):
        phi = P(text)
        theta = stokes_directions(phi)[1]
        region = concentrated_region(phi, theta)
        for f in (phi, -phi):
            rep = oracle_verdict(f, region, 4000)
            assert rep.verdict is Verdict.Tempered, (text, rep.diagnostics)


def test_oracle_determinism():
    r = Sector(pi(F(3, 4)), F(1, 5), F(1, 2))
    a = oracle_verdict(P("1/z^2 - i/z"), r, 2000, seed=11)
    b = oracle_verdict(P("1/z^2 - i/z"), r, 2000, seed=11)
    assert a == b


def test_oracle_numeric_coefficients():
    # coefficient list indexed by pole order, as for non-Gaussian-rational input
    r = Sector(pi(1), F(1, 4), F(1, 2))
    rep = oracle_verdict([0, 1.0, 0.3 + 0.2j], r, 2000)
    assert rep.verdict is sector_verdict(P("1/z + (3/10+1/5i)/z^2"), r) is Verdict.NotTempered
    assert rep.to_json()["verdict"] == "NotTempered"


def test_oracle_budget_floor():
    with pytest.raises(ValueError):
        oracle_verdict(P("1/z"), ParabolicU1(), 10)


def test_config_file(tmp_path):
    path = tmp_path / "oracle.toml"
    path.write_text("samples = 2000\ndelta_m = 0.25\nseed = 4\n")
    cfg = OracleConfig.from_file(path)
    assert cfg.samples == 2000 and cfg.delta_m == 0.25 and cfg.seed == 4
    with pytest.raises(ValueError):
        OracleConfig.from_mapping({"bogus": 1})


@settings(max_examples=12)
@given(exppolys(max_pole=3), st.integers(0, 47), st.integers(1, 6), st.sampled_from([F(1, 2), F(2)]))
def test_oracle_scaling(phi, k, e, lam):
    s = Sector(pi(F(k, 24)), F(e, 24), F(1, 2))
    v = sector_verdict(phi, s)
    if v is Verdict.Boundary:
        return
    a = oracle_verdict(phi, s, 2000).verdict
    b = oracle_verdict(phi.scale(lam), s, 2000).verdict
    if a is not Verdict.Boundary and b is not Verdict.Boundary:
        assert a is b
