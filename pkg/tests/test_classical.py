from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from qlattice.classical import (
    CommElement,
    Derivation,
    bracket_action,
    euler_field,
    hw_report,
    poisson_bracket,
    rep_fields,
    sl2_defects,
)

x = CommElement.var
SLOTS = ["x1", "x2", "x3"]

half = st.integers(-4, 4).map(lambda d: Fraction(d, 2))
monomials = st.builds(
    lambda e, c: CommElement.monomial(dict(zip(SLOTS, e)), c),
    st.lists(st.integers(-2, 2), min_size=3, max_size=3),
    st.integers(-3, 3).filter(bool),
)
forms = st.builds(
    lambda c, a: CommElement.form_power(dict(zip(SLOTS, c)), a),
    st.lists(st.integers(0, 2), min_size=3, max_size=3).filter(lambda c: sum(1 for v in c if v) > 1 and gcd(*c) == 1),
    half.filter(bool),
)
factors = st.one_of(monomials, forms)


@st.composite
def elements(draw):
    out = draw(factors)
    for _ in range(draw(st.integers(0, 1))):
        out = out * draw(factors)
    if draw(st.booleans()):
        out = out + draw(monomials)
    return out


@settings(max_examples=25, deadline=None)
@given(elements(), elements(), st.sampled_from(SLOTS))
def test_leibniz(f, g, v):
    assert (f * g).diff(v) == f.diff(v) * g + f * g.diff(v)


@settings(max_examples=30, deadline=None)
@given(elements())
def test_partials_commute(f):
    assert f.diff("x1").diff("x2") == f.diff("x2").diff("x1")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=2, max_size=2).filter(lambda c: gcd(*c) == 1), half.filter(bool))
def test_power_rule(c, a):
    L = {"x1": c[0], "x2": c[1]}
    f = CommElement.form_power(L, a)
    expected = CommElement.form_power(L, a - 1) * CommElement.scalar(a * c[0])
    assert f.diff("x1") == expected


def test_square_root_squares():
    r = CommElement.form_power({"x1": 1, "x2": 1}, Fraction(1, 2))
    assert r * r == x("x1") + x("x2")
    assert (r * r.inverse()) == CommElement.scalar(1)


def test_zero_test_is_canonical():
    a = CommElement.form_power({"x1": 1, "x2": 1}, -1)
    b = (x("x1") + x("x2")).inverse()
    assert (a - b).is_zero()


def test_degree():
    f = CommElement.form_power({"x1": 1, "x2": 1}, -1) * x("x3")
    assert f.degree() == 0
    assert (x("x1") + x("x2") * x("x2")).degree() is None


@settings(max_examples=30, deadline=None)
@given(st.lists(half, min_size=3, max_size=3), monomials)
def test_H_measures_degree(e, f):
    _, H, _ = rep_fields("two_point")
    g = CommElement.monomial(dict(zip(["x1", "x2", "Uplus"], e)), 3)
    assert H(g) == g * CommElement.scalar(sum(e))
    assert euler_field(SLOTS)(f) == f * CommElement.scalar(f.degree())


def test_poisson_brackets():
    assert poisson_bracket("x1", x("x2")) == x("x1") * x("x2")
    assert poisson_bracket("x2", x("x1") ** 3) == CommElement.monomial({"x1": 3, "x2": 1}, -3)
    assert poisson_bracket("x1", x("x1") ** 3) == CommElement.monomial({"x1": 4}, 3)


def test_field_brackets_two_point():
    E, H, F = rep_fields("two_point")
    f = CommElement.monomial({"x1": 2, "x2": 1, "Uplus": 1}) + x("x2") * x("Uplus")
    assert bracket_action(H, E, f) == E(f)
    assert bracket_action(H, F, f) == -F(f)
    expected = -(CommElement.scalar(2) * x("Uplus") * f.diff("Uplus") + x("x1") * f.diff("x1") + x("x2") * f.diff("x2"))
    assert bracket_action(E, F, f) == expected


def test_defects_report_three_entries():
    d = sl2_defects("two_point", x("x1"))
    assert set(d) == {"HE", "HF", "EF"}
    assert not d["HE"].is_zero()


def test_hw_report_on_two_point_F():
    f = CommElement.monomial({"x1": Fraction(1, 2), "x2": Fraction(-1, 2)}) * CommElement.form_power(
        {"x1": 1, "x2": 1}, Fraction(-1, 2)
    )
    rep = hw_report("two_point", f)
    assert rep.F.is_zero()
    assert rep.H == f * CommElement.scalar(Fraction(-1, 2))
    assert not rep.E.is_zero()
    assert set(rep.as_dict()) == {"H", "E", "F"}


def test_derivation_call():
    D = Derivation([(x("x2"), "x1")])
    assert D(x("x1") ** 2) == CommElement.monomial({"x1": 1, "x2": 1}, 2)


def test_unknown_kind():
    with pytest.raises(ValueError):
        rep_fields("five_point")
