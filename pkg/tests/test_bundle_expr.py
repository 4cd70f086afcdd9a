from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eqindex import bundle_expr as bx
from eqindex.bundle_expr import Grading
from eqindex.errors import EmptyWeightSet, InvalidGrading, InvalidLevel, ZeroWeight
from eqindex.ring import Factor, FactorList, Region, render

from oracles import naive_expand, series_dict

dims_st = st.dictionaries(st.integers(1, 3), st.integers(1, 2), max_size=2)
nonempty_dims = st.dictionaries(st.integers(1, 3), st.integers(1, 2), min_size=1, max_size=2)


def _same(a: bx.BundleExpr, b: bx.BundleExpr, q_max=2, G=10, regions=tuple(Region)) -> bool:
    return all(render(a.evaluate(q_max), r, q_max, G).agrees_with(render(b.evaluate(q_max), r, q_max, G))
               for r in regions)


def test_sym_tower_of_one_line():
    fl = bx.sym_tower({2: 1}).evaluate(3)
    expected = FactorList.of(*[Factor(n, w, -1) for n in (1, 2, 3) for w in (2, -2)])
    assert fl == expected


def test_lambda_tower_signs():
    plus = bx.lambda_tower({1: 1}, +1, real=False, count=1).evaluate(1)
    minus = bx.lambda_tower({1: 1}, -1, real=False, count=1).evaluate(1)
    assert plus == FactorList.of(Factor(1, 1, 1, -1))   # 1 + q g
    assert minus == FactorList.of(Factor(1, 1, 1, 1))   # 1 - q g


def test_jacobi_triple_product():
    # prod (1 - q^n)(1 + q^{n-1/2} g)(1 + q^{n-1/2} g^-1) = sum_k q^{k^2/2} g^k
    expr = bx.lambda_tower({1: 1}, +1, Fraction(1, 2)) * bx.lambda_tower({}, -1, 1, zero_rank=1)
    Q = Fraction(13, 2)
    ser = render(expr.evaluate(Q), Region.AT_ZERO, Q, 10)
    expected = {(Fraction(k * k, 2), Fraction(k)): 1 for k in range(-3, 4)}
    assert series_dict(ser) == expected


def test_spinor_characters():
    ts = bx.SpinorFactor(((1, 1), (2, 1)), v0_rank=2).factor_list()
    # 2 (g^{1/2} + g^{-1/2})(g + g^{-1})
    expect = {(0, Fraction(3, 2)): 2, (0, Fraction(1, 2)): 2, (0, Fraction(-1, 2)): 2, (0, Fraction(-3, 2)): 2}
    assert series_dict(render(ts, Region.AT_ZERO, 0, 5)) == expect
    te = bx.SpinorFactor(((1, 1),), sigma_v=-1, grading=Grading.TAU_E).factor_list()
    # -(g^{-1/2} - g^{1/2})
    assert series_dict(render(te, Region.AT_ZERO, 0, 5)) == {(0, Fraction(-1, 2)): -1, (0, Fraction(1, 2)): 1}
    assert bx.SpinorFactor(((1, 1),), v0_rank=2, grading=Grading.TAU_E).factor_list().is_zero()


@given(dims_st, st.integers(0, 1), st.sampled_from([1, -1]))
def test_R_i_agree_with_their_F_V_form(vd, p0, sv):
    for i in (1, 2, 3, 4):
        fi, grading = bx.R_from_F_V(i)
        assert _same(bx.R_V(i, vd, 2 * p0, sv), bx.F_V(vd, 2 * p0, fi, grading, sv), regions=(Region.AT_ZERO,))


@given(dims_st)
def test_tau_e_grading_pairs(vd):
    assert _same(bx.grading_sign(bx.R_V(1, vd), "tau_e"), bx.R_V(2, vd), regions=(Region.AT_ZERO,))
    assert _same(bx.grading_sign(bx.R_V(2, vd), "tau_e"), bx.R_V(1, vd), regions=(Region.AT_ZERO,))


def test_tau_e_needs_spinor():
    with pytest.raises(InvalidGrading):
        bx.grading_sign(bx.R_V(3, {1: 1}), Grading.TAU_E)


@given(st.lists(st.integers(1, 7), min_size=1, max_size=4))
def test_phi_levels(weights):
    levels = bx.phi_levels(weights)
    betas = [lv.beta for lv in levels]
    assert betas == sorted(set(betas))
    assert betas[-1] == 1 and all(0 < b <= 1 for b in betas)
    assert {Fraction(k, v) for v in weights for k in range(1, v + 1)} == set(betas)
    assert all(lv.p == lv.beta.numerator and lv.n == lv.beta.denominator for lv in levels)


def test_phi_levels_errors():
    with pytest.raises(EmptyWeightSet):
        bx.phi_levels([])
    with pytest.raises(ZeroWeight):
        bx.phi_levels([0, 1])


@given(nonempty_dims, st.integers(1, 3))
def test_level_towers_hit_the_endpoints(dims, p):
    levels = bx.phi_levels(dims)
    Q = 3
    assert bx.F_level(dims, p, 0, levels).evaluate(Q) == bx.F_minus(dims, p - 1).evaluate(Q)
    assert bx.F_level(dims, p, len(levels), levels).evaluate(Q) == bx.F_minus(dims, p).evaluate(Q)


def test_level_errors():
    levels = bx.phi_levels([1, 2])
    with pytest.raises(InvalidLevel):
        bx.F_level({1: 1}, 0, 0, levels)
    with pytest.raises(InvalidLevel):
        bx.F_level({1: 1}, 1, 5, levels)


@given(nonempty_dims, st.sampled_from([Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1)]))
def test_F_beta_towers_start_at_first_positive_degree(dims, beta):
    expr = bx.F_beta(dims, beta)
    for atom in expr.atoms:
        shift = beta * atom.weight * (-1 if atom.conjugated else 1)
        assert 0 < atom.q_offset <= 1
        assert (atom.q_offset - shift).denominator == 1


small_dims = st.dictionaries(st.integers(1, 2), st.integers(1, 2), max_size=2)


@settings(max_examples=40)
@given(st.builds(lambda d, v: (d, v), small_dims, small_dims), st.sampled_from([0, 1, 2]))
def test_evaluate_with_slope_is_substitution(dv, s):
    dims, vd = dv
    # exterior towers only: shifted Sym towers can acquire negative-degree denominators.
    # Weights stay <= 2: at slope 2 weight-3 towers push the q-floor below -90.
    expr = bx.lambda_tower(dims, -1, 1) * bx.R_V(3, vd)
    Q = 2
    direct = expr.evaluate(Q, slope=s)
    # a factor at degree n lands at n - s|w| and multiplies terms as low as the q-floor,
    # so truncating at Q - floor + s max|w| loses nothing
    wmax = max(list(dims) + list(vd) + [0])
    via = expr.evaluate(Q - min(direct.q_floor(), 0) + s * wmax).substitute(slope=s)
    a = render(direct, Region.AT_ZERO, Q, 6)
    b = render(via, Region.AT_ZERO, Q, 6)
    assert a.agrees_with(b)


@given(st.lists(st.integers(-3, 3).filter(bool), min_size=1, max_size=3))
def test_normal_modes_match_geometric_expansion(weights):
    pos = sum(w for w in weights if w > 0)
    fl = FactorList({(0, pos): 1}, [Factor(0, abs(w), -1) for w in weights])
    expect = {h: c for (_, h), c in naive_expand(fl, Region.AT_ZERO, 0, 12).items()}
    got = dict(bx.normal_modes(weights, "+", 12).items())
    assert got == expect
    assert bx.normal_modes(weights, "-", 12) == bx.normal_modes([-w for w in weights], "+", 12).mirror()


def test_normal_modes_reject_zero_weight():
    with pytest.raises(ZeroWeight):
        bx.normal_modes([0, 1])


def test_expression_printing():
    s = bx.R_V(1, {1: 1}).pretty()
    assert "(S+ + S-)(V)" in s and "Lambda+" in s


def test_witten_R_on_a_weight_one_point():
    from eqindex.datum import FixedComponentDatum
    c = FixedComponentDatum("n", (1,), 1)
    fl = bx.witten_R(c).evaluate(0)
    # g^{1/2} (1 - g)^{-1}: the det is absorbed, no extra power of g
    assert series_dict(render(fl, Region.AT_ZERO, 0, 4)) == {(0, Fraction(2 * k + 1, 2)): 1 for k in range(4)}
    primed = render(bx.witten_R(c, primed=True).evaluate(0), Region.AT_INFINITY, 0, 4)
    assert series_dict(primed) == {(0, -Fraction(2 * k + 1, 2)): 1 for k in range(4)}
