import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tempgrowth.exppoly import ExpPolynomial, positive_proportionality
from tempgrowth.gaussian import QI
from tempgrowth.growth import distinguishing_witness
from tempgrowth.linalg import determinant, matmul
from tempgrowth.models import (
    GoodModel,
    OperatorSpec,
    RegularPart,
    SchemaError,
    fully_faithful_check,
    graded_stalk_equal,
    newton_polygon_katz,
    rank_one_operator,
    ray_partition,
    regular_hom_dim,
    regular_iso,
    tempered_hom_dim,
    tempered_iso_good_models,
    tempered_iso_twisted,
    underlying_local_system,
)

from conftest import P, exppolys
from oracles import brute_force_conjugate, conjugate, qi_matrix

I1, I2 = RegularPart.identity(1), RegularPart.identity(2)
J2 = RegularPart.jordan(1, 2)
G = GoodModel.of


def test_regular_hom_dim():
    assert regular_hom_dim(I1, I1) == 1
    assert regular_hom_dim(J2, J2) == 2
    assert regular_hom_dim(RegularPart.scalar(2), RegularPart.scalar(3)) == 0


def test_regular_iso():
    d12 = RegularPart.from_matrix([[1, 0], [0, 2]])
    d21 = RegularPart.from_matrix([[2, 0], [0, 1]])
    assert regular_iso(d12, d21)
    assert not regular_iso(J2, I2)
    t = [[1, 2], [3, "i"]]
    g = qi_matrix([[1, 1], [0, 2]])
    assert regular_iso(RegularPart.from_matrix(t), RegularPart.from_matrix(conjugate(qi_matrix(t), g)))


def test_regular_part_must_be_invertible():
    with pytest.raises(ValueError):
        RegularPart.from_matrix([[1, 1], [1, 1]])


def test_tempered_hom_dim():
    assert tempered_hom_dim(P("1/z"), I1, P("3/z"), I1) == 1
    assert tempered_hom_dim(P("1/z"), I1, P("i/z"), I1) == 0
    assert distinguishing_witness(P("1/z"), P("i/z")) is not None
    assert tempered_hom_dim(ExpPolynomial.zero(), I2, P("1/z"), I1) == 0
    assert tempered_hom_dim(ExpPolynomial.zero(), I2, ExpPolynomial.zero(), I2) == 4


def classes(model):
    return [c.members for c in ray_partition(model)]


def test_ray_partition():
    assert classes(G(("1/z", I1), ("2/z", I1), ("i/z", I1))) == [(0, 1), (2,)]
    assert classes(G((ExpPolynomial.zero(), I1), ("1/z", I1))) == [(0,), (1,)]
    assert classes(G(("1/z+1/z^2", I1), ("2/z+2/z^2", I1), ("2/z+1/z^2", I1))) == [(0, 1), (2,)]


def test_tempered_iso_good_models():
    assert tempered_iso_good_models(G(("1/z", I1)), G(("2/z", I1)))
    d = tempered_iso_good_models(G(("1/z", I1)), G(("i/z", I1)))
    assert not d and d.failing_condition == "rays"
    assert tempered_iso_good_models(G(("1/z", I1), ("2/z", I1)), G(("1/z", I2)))
    d = tempered_iso_good_models(G(("1/z", I2)), G(("2/z", J2)))
    assert not d and d.failing_condition == "regular_parts"
    with pytest.raises(ValueError):
        tempered_iso_good_models(G(("1/z^(1/2)", I1)), G(("1/z", I1)))


def test_fully_faithful_examples():
    assert tuple(fully_faithful_check(G(("1/z", I1)), G(("1/z", I1)), P("1/z^2"))) == (1, 1, True)
    assert tuple(fully_faithful_check(G(("1/z", I1)), G(("2/z", I1)), P("1/z^2"))) == (0, 0, True)
    assert tuple(fully_faithful_check(G(("1/z", I2)), G(("1/z", J2)), P("1/z^2"))) == (2, 2, True)
    with pytest.raises(ValueError):
        fully_faithful_check(G(("1/z^2", I1)), G(("1/z", I1)), P("1/z^2"))


def test_graded_stalk_equal():
    assert not graded_stalk_equal(G(("1/z", I1)), G(("2/z", I1)))
    assert graded_stalk_equal(G(("1/z", I2)), G(("1/z", J2)))
    assert graded_stalk_equal(G(("1/z", I1), ("-1/z", I1)), G(("-1/z", I1), ("1/z", I1)))


def test_underlying_local_system():
    assert underlying_local_system(G(("1/z", RegularPart.scalar(5)))).monodromy == ((QI(5),),)
    m = underlying_local_system(G(("1/z", I1), ("2/z", RegularPart.scalar(3))))
    assert m.monodromy == ((QI(1), QI(0)), (QI(0), QI(3)))
    ram = underlying_local_system(G(("1/z^(1/2)", I1)))
    t = [list(r) for r in ram.monodromy]
    # going around twice returns each determination to itself
    assert matmul(t, t) == [[QI(1), QI(0)], [QI(0), QI(1)]]
    assert t != [[QI(1), QI(0)], [QI(0), QI(1)]]


def test_tempered_iso_twisted():
    d = tempered_iso_twisted(G(("1/z", I1)), G(("2/z", I1)), P("1/z^3"), 2)
    assert not d and d.failing_condition == "graded_stalk"
    assert tempered_iso_twisted(G(("1/z", I1)), G(("1/z", I1)), P("1/z^3"), 2)
    d = tempered_iso_twisted(G(("1/z", I2)), G(("1/z", J2)), P("1/z^3"), 2)
    assert not d and d.failing_condition == "local_system"
    assert graded_stalk_equal(G(("1/z", I2)), G(("1/z", J2)))


def test_tempered_iso_twisted_hypotheses():
    with pytest.raises(ValueError):
        tempered_iso_twisted(G(("1/z^2", I1)), G(("1/z", I1)), P("1/z^3"), 2)
    with pytest.raises(ValueError):
        tempered_iso_twisted(G(("1/z", I1)), G(("1/z", I1)), P("1/z^2"), 2)


def test_newton_examples():
    assert newton_polygon_katz(OperatorSpec(1, {1: 1, 0: 0})) == 0
    assert newton_polygon_katz(OperatorSpec(1, {1: 2, 0: 0})) == 1
    assert newton_polygon_katz(OperatorSpec(1, {1: 3, 0: 0})) == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_newton_rank_one(n):
    assert newton_polygon_katz(rank_one_operator(P(f"1/z^{n}"))) == n


def test_newton_higher_order():
    # z^2 d^2 + z d - 1 has only slope-0 data
    assert newton_polygon_katz(OperatorSpec(2, {2: 2, 1: 1, 0: 0})) == 0
    # d^2 - z^-4 : exp(1/z) type solutions
    assert newton_polygon_katz(OperatorSpec(2, {2: 0, 0: -4})) == 1
    assert newton_polygon_katz(OperatorSpec(2, {2: 0, 0: -3})) == Fraction(1, 2)


def test_json_roundtrip(tmp_path):
    m = G(("1/z^2", I2), ("(1+i)/z", RegularPart.from_matrix([["1/2", "i"], [0, 1]])))
    path = tmp_path / "m.json"
    path.write_text(json.dumps(m.to_json()))
    assert GoodModel.load(path) == m


@pytest.mark.parametrize("payload", [
    [],
    {"l": 0, "terms": []},
    {"l": 1, "terms": [{"phi": "1/z", "rank": 1}]},
    {"l": 1, "terms": [{"phi": "1/z", "rank": 2, "monodromy": [["1"]]}]},
    {"l": 1, "terms": [{"phi": "1/z +", "rank": 1, "monodromy": [["1"]]}]},
    {"l": 1, "terms": [{"phi": "1/z", "rank": 1, "monodromy": [["0"]]}]},
    {"l": 1, "terms": [{"phi": "1/z^(1/2)", "rank": 1, "monodromy": [["1"]]}]},
])
def test_schema_errors(payload):
    with pytest.raises(SchemaError):
        GoodModel.from_json(payload)


# properties -----------------------------------------------------------------

@st.composite
def regular_parts(draw, max_rank=3):
    n = draw(st.integers(1, max_rank))
    kind = draw(st.sampled_from(["id", "jordan", "diag"]))
    if kind == "id":
        return RegularPart.identity(n)
    if kind == "jordan":
        return RegularPart.jordan(draw(st.sampled_from([1, 2, -1])), n)
    return RegularPart.from_matrix([[draw(st.sampled_from([1, 2, 3])) if i == j else 0 for j in range(n)]
                                    for i in range(n)])


@st.composite
def good_models(draw, max_terms=3, max_pole=2):
    k = draw(st.integers(1, max_terms))
    out = {}
    for _ in range(k):
        phi = draw(exppolys(max_pole=max_pole))
        out[phi] = draw(regular_parts(max_rank=2))
    return GoodModel(1, tuple(out.items()))


@given(regular_parts())
def test_centraliser_dimension(r):
    assert regular_hom_dim(r, r) >= r.rank


@given(good_models(), st.sampled_from([Fraction(1, 2), Fraction(3)]))
def test_iso_under_positive_scaling(m, lam):
    scaled = GoodModel(1, tuple((phi.scale(lam), reg) for phi, reg in m.terms))
    assert tempered_iso_good_models(m, scaled)


@given(good_models(), st.randoms())
def test_iso_under_permutation(m, rnd):
    terms = list(m.terms)
    rnd.shuffle(terms)
    assert tempered_iso_good_models(m, GoodModel(1, tuple(terms)))


@given(good_models(max_terms=2))
def test_twisted_reflexive(m):
    k = int(m.katz) + 1
    omega = ExpPolynomial.from_terms({k + 1: QI(1)}, 1)
    assert tempered_iso_twisted(m, m, omega, k)


@given(good_models(), good_models())
def test_fully_faithful_property(m1, m2):
    k = int(max(m1.katz, m2.katz)) + 1
    omega = ExpPolynomial.from_terms({k: QI(1, 1)}, 1)
    assert fully_faithful_check(m1, m2, omega).equal


@given(st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2),
       st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2))
def test_similarity_agrees_with_search(a, b):
    # det X has degree <= 2 in each basis coefficient, so a nonzero one cannot
    # vanish on all of {0,1,2}^d: the grid search is exhaustive for 2x2
    ta, tb = qi_matrix(a), qi_matrix(b)
    if not (determinant(ta) and determinant(tb)):
        return
    assert (brute_force_conjugate(ta, tb) is not None) == regular_iso(
        RegularPart.from_matrix(ta), RegularPart.from_matrix(tb))
