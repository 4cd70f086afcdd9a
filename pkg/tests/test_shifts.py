from fractions import Fraction
from math import floor

import pytest
from hypothesis import given, settings, strategies as st

from eqindex import catalog
from eqindex.bundle_expr import phi_levels
from eqindex.datum import FixedComponentDatum
from eqindex.errors import IncompatibleTwist, InvalidLevel
from eqindex.ring import BigradedSeries
from eqindex.shifts import (ShiftSpec, chain_check, check_prop_3_1, check_prop_4_1, constants, dual_offset,
                            epsilon, level_constants, recursion_check, translation_check)

rat = st.integers(-6, 6).map(lambda n: Fraction(n, 2))
specs = st.builds(ShiftSpec, st.integers(-2, 2).map(Fraction), rat, rat, st.sampled_from([1, -1]),
                  st.sampled_from([1, -1]))


@st.composite
def components(draw, max_rank=2, max_weight=3):
    def weights():
        out = []
        for v in range(1, max_weight + 1):
            out += [v * draw(st.sampled_from([1, -1]))] * draw(st.integers(0, max_rank))
        return tuple(out)
    tw = weights() or (draw(st.integers(1, max_weight)),)
    return FixedComponentDatum("c", tw, draw(st.sampled_from([1, -1])), v_weights=weights(),
                               v0_rank=2 * draw(st.integers(0, 1)))


def _poly():
    terms = {(Fraction(m), Fraction(h)): (m + 2 * h) % 5 - 2 for m in range(3) for h in range(-3, 4)}
    return BigradedSeries(terms, q_max=6, g_window=20, q_floor=0, g_support=(-3, 3))


# -- shift specifications --------------------------------------------------


@given(specs, specs)
def test_composition_matches_sequential_application(a, b):
    ser = _poly()
    seq = b.apply(a.apply(ser))
    one = a.then(b).apply(ser)
    assert seq.agrees_with(one)


@given(specs, specs, specs)
def test_composition_is_associative(a, b, c):
    assert a.then(b).then(c) == a.then(b.then(c))


@given(specs)
def test_inverse(a):
    ident = ShiftSpec(0, 0, 0, a.sign * a.sign, 1)
    assert a.then(a.inverse()) == ident
    assert a.inverse().then(a) == ident


@given(st.dictionaries(st.integers(1, 4), st.integers(1, 3), max_size=3), st.integers(0, 6).map(lambda n: Fraction(n, 3)),
       st.booleans())
def test_dual_offset_brute_force(vd, s, half):
    kappa, count, gpow = dual_offset(vd, s, half)
    h = Fraction(1, 2) if half else 0
    # the conjugate tower of weight -u at degrees n - s u - h, n >= 1: lines at degree <= 0 are dualized
    k2, c2, g2 = Fraction(0), 0, Fraction(0)
    for u, d in vd.items():
        for n in range(1, 50):
            deg = n - s * u - h
            if deg <= 0:
                k2 += d * deg
                c2 += d
                g2 -= d * u
    assert (kappa, count, gpow) == (k2, c2, g2)


def test_integral_shift_constants():
    c = FixedComponentDatum("c", (1, 2, -3), 1, v_weights=(1, 1, 2))
    k = constants(c)
    spec = k.integral_shift_spec(2, c.d_V)
    assert spec.s == 2 and spec.d == 4 * k.e
    assert spec.c == 4 * k.e - 2 * k.e_N - k.d_N


# -- component identities --------------------------------------------------


@settings(max_examples=12)
@given(components(), st.integers(1, 2), st.sampled_from([1, 2]))
def test_integral_shift_random(c, p, i):
    v = check_prop_3_1(c, p, i, 2, 40)
    assert v.passed, v.line()


@given(components(max_rank=3, max_weight=4), st.integers(1, 3))
def test_endpoint_identities(c, p):
    levels = phi_levels(c.n_dims)
    top = level_constants(c, p, len(levels), levels)
    bottom = level_constants(c, p, 0, levels)
    assert top.e == Fraction(p * p * c.e_N + p * c.d_N, 2)
    assert bottom.e == Fraction((p - 1) ** 2 * c.e_N + (p - 1) * c.d_N, 2)
    assert top.d_prime == c.d_N and bottom.d_prime == 0


def test_level_constant_examples():
    c = FixedComponentDatum("c", (1,), 1)
    levels = phi_levels(c.n_dims)
    assert level_constants(c, 1, 1, levels).e == 1
    assert level_constants(c, 1, 0, levels).e == 0
    with pytest.raises(InvalidLevel):
        level_constants(c, 1, 2, levels)


@settings(max_examples=8)
@given(components(), st.integers(1, 2), st.data())
def test_level_shift_random(c, p, data):
    levels = phi_levels(c.n_dims)
    j = data.draw(st.integers(1, len(levels)))
    v = check_prop_4_1(c, p, j, levels, 2, 40)
    assert v.passed, v.line()


def test_level_shift_reports_epsilon_three_ways():
    c = FixedComponentDatum("c", (1, 2), 1, v_weights=(1, 3))
    v = check_prop_4_1(c, 2, 2, None, 2, 40)
    assert v.passed
    for row in v.details["epsilon"].values():
        assert row["formula"] == row["derived"]
        assert row["fit"] in (None, row["formula"])


@given(components(), st.integers(1, 3))
def test_epsilon_at_the_top_level_is_s_squared_e(c, p):
    # at beta = 1 the slope is s = p and the offset reduces to s^2 e
    levels = phi_levels(c.n_dims)
    e = Fraction(c.e_V - c.e_N, 2)
    assert epsilon(c, p, len(levels), 1, levels) == p * p * e


# -- global identities -----------------------------------------------------


@pytest.mark.parametrize("name,op", [("S4-w12-V", "dirac-R2"), ("CP3-V2", "dirac-R1"), ("S2-w2", "dirac-sym")])
def test_recursion_passes(name, op):
    vs = recursion_check(catalog.get(name), op, 1, 2, 40)
    assert all(v.passed for v in vs), [v.line() for v in vs if not v.passed]
    assert {v.check for v in vs} == {"recursion", "chain", "integral_shift"}


def test_recursion_negative_control():
    vs = recursion_check(catalog.get("CP3-V2"), "dirac-R2", 1, 2, 40, e_extra=1, chain=False)
    assert not all(v.passed for v in vs if v.check == "recursion")


def test_recursion_rejects_other_twists():
    with pytest.raises(IncompatibleTwist):
        recursion_check(catalog.get("S2-w1"), "dirac-theta-q", 1)


def test_chain_compares_terms():
    v = chain_check(catalog.get("CP3-V2"), "dirac-R2", 1, 2, 12)
    assert v.passed and v.details["checked_terms"] > 0


@pytest.mark.parametrize("p", [1, 2])
def test_translation_law(p):
    v = translation_check(catalog.get("CP3-V2"), "dirac-R2", p, 3, 40)
    assert v.passed and v.details["checked_terms"] > 100


def test_translation_negative_control():
    assert not translation_check(catalog.get("CP3-V2"), "dirac-R2", 1, 3, 40, e_override=1).passed
    v = translation_check(catalog.get("CP3"), "dirac-sym", 1)
    assert not v.passed and "not constant" in v.details["reason"]


def test_translation_target_formula():
    v = translation_check(catalog.get("S2-w1-V"), "dirac-R2", 1, 2, 20)
    assert v.passed
    e = v.details["e"]
    assert e == 0 or floor(e) == e


def test_epsilon_stays_exact_without_V():
    # thirds are not representable in binary floating point
    c = FixedComponentDatum("p0", (1, 2, 3), 1)
    levels = phi_levels(c.n_dims)
    v = check_prop_4_1(c, 1, 3, levels, 2, 40)
    assert v.passed, v.line()
    assert all(isinstance(row["derived"], Fraction) for row in v.details["epsilon"].values())
