"""Shift operators, anomaly constants and the level recursion.

The shift by slope ``s`` sends a weight line of weight ``w`` sitting at
q-degree ``n`` to q-degree ``n + s w``.  On characters this is the
substitution ``g -> q^s g`` applied to the tower factors only; determinant
and line factors keep their place.  Lines pushed to non-positive degree
are dualized, which costs a power of q, a determinant and (for the graded
exterior algebra) a sign.

All identities are checked on rendered expansions: two factor lists agree
if their expansions agree coefficient by coefficient in the window.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence

from . import bundle_expr as bx
from .bundle_expr import AtomKind, BundleExpr, Grading, Level, WeightAtom, phi_levels, level_beta
from .datum import FixedComponentDatum, ManifoldDatum
from .errors import InvalidLevel, WindowExceeded
from .ring import BigradedSeries, FactorList, Rat, Region, frac, render
from .verdict import Verdict

__all__ = [
    "ShiftSpec", "AnomalyConstants", "constants", "phi_levels", "level_constants", "apply_shift",
    "shift_atoms", "split_spinor", "dual_offset", "epsilon", "check_prop_3_1", "check_prop_4_1",
    "recursion_check", "chain_check", "translation_check", "LevelConstants", "monomial_weight",
]


# ---------------------------------------------------------------------------
# shift specifications


@dataclass(frozen=True)
class ShiftSpec:
    """The map ``F(q, g) -> sign * q^c g^d F(q, q^s g)``.

    ``grading_flip`` is the extra sign picked up under the tau_e grading.
    """

    s: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)
    sign: int = 1
    grading_flip: int = 1

    def __post_init__(self):
        for name in ("s", "c", "d"):
            object.__setattr__(self, name, frac(getattr(self, name)))
        if self.sign not in (1, -1) or self.grading_flip not in (1, -1):
            raise ValueError("signs must be +1 or -1")

    def total_sign(self, grading: Grading | str = Grading.TAU_S) -> int:
        return self.sign * (self.grading_flip if Grading(grading) is Grading.TAU_E else 1)

    def then(self, other: "ShiftSpec") -> "ShiftSpec":
        """Apply ``self`` first, then ``other``.

        The exponents add except that the first g-offset is moved by the
        second slope: ``c = c1 + c2 + s2 d1``.
        """
        return ShiftSpec(self.s + other.s, self.c + other.c + other.s * self.d, self.d + other.d,
                         self.sign * other.sign, self.grading_flip * other.grading_flip)

    def inverse(self) -> "ShiftSpec":
        return ShiftSpec(-self.s, -self.c + self.s * self.d, -self.d, self.sign, self.grading_flip)

    def apply_fl(self, fl: FactorList, grading: Grading | str = Grading.TAU_S) -> FactorList:
        return fl.substitute(self.s, self.c, self.d, self.total_sign(grading))

    def apply(self, series: BigradedSeries, grading: Grading | str = Grading.TAU_S) -> BigradedSeries:
        return series.substitute(self.s, self.c, self.d, self.total_sign(grading))

    def to_json(self) -> dict:
        return {"s": str(self.s), "c": str(self.c), "d": str(self.d), "sign": self.sign,
                "grading_flip": self.grading_flip}


def apply_shift(series: BigradedSeries, spec: ShiftSpec, grading: Grading | str = Grading.TAU_S) -> BigradedSeries:
    return spec.apply(series, grading)


@dataclass(frozen=True)
class AnomalyConstants:
    e_N: int
    d_N: int
    e_V: int
    d_V: int

    @property
    def e(self) -> Fraction:
        """Half the difference of the weight-squared sums of V and N."""
        return Fraction(self.e_V - self.e_N, 2)

    def integral_shift_spec(self, p: int, sigma_v_parity: int) -> ShiftSpec:
        e = self.e
        c = p * p * e - Fraction(p * p * self.e_N, 2) - Fraction(p * self.d_N, 2)
        return ShiftSpec(p, c, 2 * p * e, 1, (-1) ** (p * sigma_v_parity % 2))


def constants(c: FixedComponentDatum) -> AnomalyConstants:
    return AnomalyConstants(c.e_N, c.d_N, c.e_V, c.d_V)


def _levels_for(c: FixedComponentDatum, levels: Sequence[Level] | None) -> Sequence[Level]:
    if levels is not None:
        return levels
    return phi_levels(c.n_dims) if c.n_dims else []


def _check_level(levels: Sequence[Level], j: int, lo: int = 0) -> None:
    if not lo <= j <= len(levels):
        raise InvalidLevel(f"level {j} outside {lo}..{len(levels)}")


@dataclass(frozen=True)
class LevelConstants:
    e: int
    d_prime: int


def level_constants(c: FixedComponentDatum, p: int, j: int,
                    levels: Sequence[Level] | None = None) -> LevelConstants:
    """``e(p, beta_j, N)`` and ``d'(beta_j, N)`` at the component."""
    levels = _levels_for(c, levels)
    _check_level(levels, j)
    b = level_beta(levels, j)
    e2, dp = 0, 0
    for v, d in c.n_dims.items():
        k = (p - 1) * v + floor(b * v)
        e2 += d * k * (k + 1)
        dp += d * floor(b * v)
    return LevelConstants(e2 // 2, dp)


# ---------------------------------------------------------------------------
# bundle-level shifts


def split_spinor(expr: BundleExpr) -> BundleExpr:
    """Replace the spinor factor by a line times exterior factors at q-degree 0.

    The line is ``g^{-d'(V)/2}`` (with ``2^{p'}`` or the tau_e sign); the
    exterior factors are the weight-zero-degree part of the loop algebra
    and move under shifts like every other tower factor.
    """
    sp = expr.spinor
    if sp is None:
        return expr
    d = sum((Fraction(u * k) for u, k in sp.v_dims), Fraction(0))
    p = sp.v0_rank // 2
    if sp.grading is Grading.TAU_S:
        coeff, sgn = 2 ** p, 1
    else:
        coeff, sgn = (0 if p else sp.sigma_v), -1
    atoms = tuple(WeightAtom(AtomKind.LAMBDA_SINGLE, u, k, 0, sign_variant=sgn, tag="V") for u, k in sp.v_dims)
    return replace(expr, atoms=expr.atoms + atoms, spinor=None, coeff=expr.coeff * coeff,
                   g_exp=expr.g_exp - d / 2)


def shift_atoms(expr: BundleExpr, s: Rat) -> BundleExpr:
    """Move every tower or single factor of weight w from degree n to n + s w."""
    s = frac(s)
    expr = split_spinor(expr)
    atoms = tuple(a if a.is_monomial else replace(a, q_offset=a.q_offset + s * a.w) for a in expr.atoms)
    return replace(expr, atoms=atoms)


def monomial_weight(expr: BundleExpr) -> Fraction:
    """Total g-weight of the monomial part (lines, determinants, spinor line)."""
    w = expr.g_exp + sum((a.w * a.rank for a in expr.atoms if a.is_monomial), Fraction(0))
    if expr.spinor is not None:
        w -= sum((Fraction(u * k) for u, k in expr.spinor.v_dims), Fraction(0)) / 2
    return w


def dual_offset(v_dims: dict[int, int], s: Rat, half: bool) -> tuple[Fraction, int, Fraction]:
    """Cost of dualizing the conjugate exterior lines pushed to degree <= 0.

    Returns ``(kappa, count, g_power)``: the q-power, the number of
    dualized lines (its parity is the tau_e sign) and the g-power of the
    determinant that appears.
    """
    s = frac(s)
    h = Fraction(1, 2) if half else Fraction(0)
    kappa, count, gpow = Fraction(0), 0, Fraction(0)
    for u, d in v_dims.items():
        top = s * u + h
        n_max = floor(top)
        if n_max <= 0:
            continue
        kappa -= d * sum(top - n for n in range(1, n_max + 1))
        count += d * n_max
        gpow -= d * u * n_max
    return kappa, count, gpow


def epsilon(c: FixedComponentDatum, p: int, j: int, i: int, levels: Sequence[Level] | None = None) -> Fraction:
    """The q-offset of the level-j shift before the level correction."""
    levels = _levels_for(c, levels)
    _check_level(levels, j, 1)
    b = level_beta(levels, j)
    out = Fraction(0)
    nd, vd = c.n_dims, c.v_dims
    for v in set(nd) | set(vd):
        dn, dv = nd.get(v, 0), vd.get(v, 0)
        x = (p - 1 + b) * v
        k = floor(b * v) + (p - 1) * v
        br = k * (k + 1) - x * (2 * k + 1)
        if i == 1:
            out += Fraction(dn - dv, 2) * br
        else:
            k2 = floor(b * v + Fraction(1, 2)) + (p - 1) * v
            out += Fraction(dn, 2) * br - Fraction(dv, 2) * (k2 * k2 - 2 * x * k2)
    return out


# ---------------------------------------------------------------------------
# comparison helpers

_REGIONS = (Region.AT_ZERO, Region.AT_INFINITY)


def _compare(lhs: FactorList, rhs: FactorList, q_max: Rat, G: Rat,
             regions: Iterable[Region] = _REGIONS) -> dict | None:
    for region in regions:
        a, b = render(lhs, region, q_max, G), render(rhs, region, q_max, G)
        diff = a.first_difference(b)
        if diff is not None:
            m, h, x, y = diff
            out = Verdict.violation(m, h, x, y)
            out["region"] = region.value
            return out
    return None


def _lowest(fl: FactorList, q_max: Rat, G: Rat, region: Region) -> Fraction | None:
    """Lowest q-degree with a nonzero coefficient in the window, or None.

    Renders with a growing q-bound from the floor up, so the grids stay small.
    """
    q_max = frac(q_max)
    top = fl.q_floor()
    while True:
        top = min(top, q_max)
        qs = render(fl, region, top, G).q_degrees()
        if qs or top >= q_max:
            return qs[0] if qs else None
        top += 1


def _line(g: Rat = 0, coeff: int = 1, q: Rat = 0) -> BundleExpr:
    return BundleExpr((), q, g, coeff)


def _sym0(dims: dict[int, int], sel, conjugated: bool) -> BundleExpr:
    return BundleExpr(tuple(bx.sym_single(v, k, 0, conjugated) for v, k in sorted(dims.items()) if sel(v)))


def _lam0(dims: dict[int, int], sel, sgn: int) -> BundleExpr:
    return BundleExpr(tuple(WeightAtom(AtomKind.LAMBDA_SINGLE, u, k, 0, sign_variant=sgn, tag="V")
                            for u, k in sorted(dims.items()) if sel(u)))


def _gsign(grading: Grading) -> int:
    return 1 if grading is Grading.TAU_S else -1


# ---------------------------------------------------------------------------
# integral shifts


def check_prop_3_1(c: FixedComponentDatum, p: int, i: int, q_max: Rat = 3, G: Rat = 40) -> Verdict:
    """The integral shift by p at one component.

    * the tower F^{-p} shifts to F^0 times ``L(N)^p``;
    * F^i_V shifts to F^i_V times ``L(V)^{-p}`` up to the dualization cost;
    * the full point character obeys the integral shift identity with
      ``c = p^2 e - p^2 e(N)/2 - p d'(N)/2`` and ``d = 2 p e``.
    """
    if p < 1 or i not in (1, 2):
        raise InvalidLevel("need p >= 1 and i in {1, 2}")
    params = {"component": c.name, "p": p, "i": i, "q_max": q_max, "g_window": G}
    nd, vd = c.n_dims, c.v_dims
    k = constants(c)
    sub: dict[str, bool] = {}

    lhs = shift_atoms(bx.F_minus(nd, p), p).evaluate(q_max)
    rhs = (bx.F_minus(nd, 0) * _line(p * k.e_N)).evaluate(q_max)
    viol = _compare(lhs, rhs, q_max, G)
    sub["N"] = viol is None
    if viol is not None:
        return Verdict("prop_3_1", params, False, dict(viol, part="N"), {"subchecks": sub})

    kappa, count, gpow = dual_offset(vd, p, half=(i == 2))
    assert gpow == -p * k.e_V
    spec = k.integral_shift_spec(p, sum(u * d for u, d in vd.items()))
    for grading in Grading:
        sgn = (-1) ** count if grading is Grading.TAU_E else 1
        FV = bx.F_V(vd, c.v0_rank, i, grading, c.sigma_v)
        lhs = shift_atoms(FV, p).evaluate(q_max)
        rhs = (FV * _line(gpow, sgn, kappa)).evaluate(q_max)
        viol = _compare(lhs, rhs, q_max, G, (Region.AT_ZERO,))
        sub[f"V/{grading.value}"] = viol is None
        if viol is not None:
            return Verdict("prop_3_1", params, False, dict(viol, part=f"V/{grading.value}"), {"subchecks": sub})

        base = _line(-Fraction(k.d_N, 2))
        full_lhs = base * bx.F_minus(nd, p) * FV
        full_rhs = base * bx.F_minus(nd, 0) * FV
        raw = full_lhs.evaluate(q_max + abs(spec.c) + 1, slope=p)
        sub_lhs = raw.substitute(q_offset=spec.c, g_offset=spec.d, sign=spec.total_sign(grading))
        viol = _compare(sub_lhs, full_rhs.evaluate(q_max), q_max, G)
        sub[f"full/{grading.value}"] = viol is None
        if viol is not None:
            return Verdict("prop_3_1", params, False, dict(viol, part=f"full/{grading.value}"),
                           {"subchecks": sub, "shift": spec.to_json()})
    return Verdict("prop_3_1", params, True, None,
                   {"subchecks": sub, "shift": spec.to_json(), "kappa": kappa, "tau_e_sign": (-1) ** count})


# ---------------------------------------------------------------------------
# fractional shifts at a level


def _floor(x: Fraction) -> int:
    return floor(x)


def _level_pieces(c: FixedComponentDatum, p: int, j: int, levels: Sequence[Level]):
    b = level_beta(levels, j)
    n = levels[j - 1].n
    s = p - 1 + b
    return b, n, s


def _rhs_N(c: FixedComponentDatum, p: int, b: Fraction, n: int, gamma: int) -> BundleExpr:
    nd = c.n_dims
    zero = lambda v: v % n == 0
    gp = sum(v * d * (_floor(b * v) + (p - 1) * v + 1) for v, d in nd.items())
    if gamma == 1:
        gp -= sum(v * d for v, d in nd.items() if zero(v))
        extra = _sym0(nd, zero, conjugated=True)
    else:
        extra = _sym0(nd, zero, conjugated=False)
    return bx.F_beta(nd, b) * extra * _line(gp)


def _rhs_V(c: FixedComponentDatum, p: int, b: Fraction, n: int, i: int, grading: Grading) -> BundleExpr:
    vd, sgn = c.v_dims, _gsign(grading)
    half = i == 2
    if half:
        sel = (lambda v: 2 * v % n == 0 and v % n != 0) if n % 2 == 0 else (lambda v: False)
    else:
        sel = lambda v: v % n == 0
    h = Fraction(1, 2) if half else Fraction(0)
    gp = -sum(u * d * (_floor(b * u + h) + (p - 1) * u) for u, d in vd.items())
    out = bx.F_V_beta(vd, c.v0_rank, b, i, grading) * _lam0(vd, sel, sgn) * _line(gp)
    if i == 1:
        pp = c.p_prime
        coeff = 2 ** pp if grading is Grading.TAU_S else (0 if pp else c.sigma_v)
        out = out * _line(-Fraction(c.d_V, 2), coeff)
    return out


def check_prop_4_1(c: FixedComponentDatum, p: int, j: int, levels: Sequence[Level] | None = None,
                   q_max: Rat = 3, G: Rat = 40) -> Verdict:
    """The shift by ``s = p - 1 + beta_j`` at one component.

    Checks the four tower identities (F_{p,j-1}, F_{p,j}, F^1_V, F^2_V)
    and then the full identity ``RHS = sign q^eps LHS(q, q^s g)`` for both
    sides of the level, with eps from the closed formula and from a fit.
    """
    levels = _levels_for(c, levels)
    _check_level(levels, j, 1)
    b, n, s = _level_pieces(c, p, j, levels)
    params = {"component": c.name, "p": p, "j": j, "beta": b, "q_max": q_max, "g_window": G}
    nd, vd = c.n_dims, c.v_dims
    sub: dict[str, bool] = {}
    details: dict = {"subchecks": sub, "slope": s}

    def fail(viol, part):
        return Verdict("prop_4_1", params, False, dict(viol, part=part), details)

    for gamma, jj in ((1, j - 1), (2, j)):
        lhs = shift_atoms(bx.F_level(nd, p, jj, levels), s).evaluate(q_max)
        viol = _compare(lhs, _rhs_N(c, p, b, n, gamma).evaluate(q_max), q_max, G)
        sub[f"N/{gamma}"] = viol is None
        if viol is not None:
            return fail(viol, f"N/{gamma}")

    kappas = {}
    for i in (1, 2):
        kappa, count, _ = dual_offset(vd, s, half=(i == 2))
        kappas[i] = (kappa, count)
        for grading in Grading:
            sgn = (-1) ** count if grading is Grading.TAU_E else 1
            FV = bx.F_V(vd, c.v0_rank, i, grading, c.sigma_v)
            lhs = shift_atoms(FV, s).evaluate(q_max)
            rhs = (_rhs_V(c, p, b, n, i, grading) * _line(0, sgn, kappa)).evaluate(q_max)
            viol = _compare(lhs, rhs, q_max, G, (Region.AT_ZERO,))
            sub[f"V{i}/{grading.value}"] = viol is None
            if viol is not None:
                return fail(viol, f"V{i}/{grading.value}")

    eps_table = {}
    for i in (1, 2):
        eps_i = epsilon(c, p, j, i, levels)
        kappa, count = kappas[i]
        for gamma, jj in ((1, j - 1), (2, j)):
            lc = level_constants(c, p, jj, levels)
            eps = eps_i - lc.e
            base = _line(-Fraction(c.d_N, 2))
            for grading in Grading:
                sgn = (-1) ** count if grading is Grading.TAU_E else 1
                FV = bx.F_V(vd, c.v0_rank, i, grading, c.sigma_v)
                lhs_expr = base * bx.F_level(nd, p, jj, levels) * FV
                derived = -kappa - s * monomial_weight(lhs_expr)
                rhs = (base * _rhs_N(c, p, b, n, gamma) * _rhs_V(c, p, b, n, i, grading)).evaluate(q_max)
                raw = lhs_expr.evaluate(q_max + abs(eps) + 1, slope=s)
                lo_l = _lowest(raw, q_max + abs(eps) + 1, G, Region.AT_ZERO)
                lo_r = _lowest(rhs, q_max, G, Region.AT_ZERO)
                fit = None if lo_l is None or lo_r is None else lo_r - lo_l
                key = f"eps{i}{gamma}/{grading.value}"
                eps_table[key] = {"formula": eps, "derived": derived, "fit": fit}
                if eps != derived or (fit is not None and fit != eps):
                    sub[key] = False
                    return Verdict("level_offset", params, False,
                                   {"part": key, "formula": str(eps), "derived": str(derived), "fit": str(fit)},
                                   details)
                lhs = raw.substitute(q_offset=eps, sign=sgn)
                viol = _compare(lhs, rhs, q_max, G)
                sub[key] = viol is None
                if viol is not None:
                    return fail(viol, key)
    details["epsilon"] = eps_table
    return Verdict("prop_4_1", params, True, None, details)


# ---------------------------------------------------------------------------
# the level recursion on a manifold


def _side(m: ManifoldDatum, i: int, p: int, j: int, levels: Sequence[Level], q_max: Rat,
          slope: Rat, e_extra: Rat = 0) -> list[FactorList]:
    """Per-component terms of ``sum_alpha sign_alpha q^{-e_alpha} Ind(F_{p,j} (x) R_i)``."""
    out = []
    for c in m.components:
        lc = level_constants(c, p, j, levels)
        sign = c.sigma * (-1) ** ((lc.d_prime + c.rank_N) % 2)
        expr = (_line(-Fraction(c.d_N, 2), sign) * bx.F_level(c.n_dims, p, j, levels)
                * bx.R_V(i, c.v_dims, c.v0_rank, c.sigma_v))
        off = -(lc.e + frac(e_extra))
        out.append(expr.evaluate(q_max + max(Fraction(0), -off), slope=slope, q_offset=off))
    return out


def _sum_render(fls: Sequence[FactorList], region: Region, q_max: Rat, G: Rat) -> BigradedSeries:
    total = BigradedSeries.zero(q_max, G)
    for fl in fls:
        total = total + render(fl, region, q_max, G)
    return total


def _degree(fls: Sequence[FactorList]) -> Fraction:
    return max((sum((abs(f.w) * -f.power for f in fl.pure_g_factors()), Fraction(0)) for fl in fls),
               default=Fraction(0))


def _resolve_op(m: ManifoldDatum, op) -> tuple[ManifoldDatum, int, str]:
    """Map an operator to (datum, i) for the R_i(V) twist of the recursion.

    The Sym-tower twist is the case V = 0, where every R_i is trivial.
    """
    from .errors import IncompatibleTwist
    from .localization import OperatorSpec, operator

    if isinstance(op, int):
        return m, op, f"R{op}"
    spec = operator(op) if isinstance(op, str) else op
    if not isinstance(spec, OperatorSpec) or spec.base != "dirac":
        raise IncompatibleTwist("the recursion needs a Dirac operator twisted by R_i(V) or the Sym tower")
    if spec.twist in ("R1", "R2", "R3", "R4"):
        return m, int(spec.twist[1]), spec.name
    if spec.twist == "sym":
        bare = m.replace_components(replace(c, v_weights=(), v0_rank=0) for c in m.components)
        return bare, 4, spec.name
    raise IncompatibleTwist(f"operator {spec.name!r} has no level recursion")


def recursion_check(m: ManifoldDatum, op, p: int, q_max: Rat = 2, G: Rat = 40,
                    levels: Sequence[Level] | None = None, e_extra: Rat = 0,
                    max_n: int | None = None, chain: bool = True) -> list[Verdict]:
    """Level-by-level recursion for ``D (x) F_{p,j} (x) R_i(V)``.

    One verdict per level j: the (j-1) and j sides agree after the wall
    shift.  Both sides are written in the coordinates ``g -> q^{s_j} g``;
    the j-1 side is expanded at infinity and the j side at zero.
    ``e_extra`` adds a deliberate error to the offsets of the j side
    (negative control); ``max_n`` skips levels with larger denominators.
    With ``chain`` the list ends with the direct comparison of the end
    levels and the per-point integral shift identity.
    """
    m, i, name = _resolve_op(m, op)
    if levels is None:
        levels = phi_levels(m.weight_set)
    out = []
    for j in range(1, len(levels) + 1):
        if max_n is not None and levels[j - 1].n > max_n:
            continue
        s = p - 1 + levels[j - 1].beta
        A = _side(m, i, p, j - 1, levels, q_max, s)
        B = _side(m, i, p, j, levels, q_max, s, e_extra)
        deg = max(_degree(A), _degree(B))
        params = {"manifold": m.name, "op": name, "p": p, "j": j, "beta": levels[j - 1].beta,
                  "q_max": q_max, "g_window": G}
        details = {"slope": s, "denominator_degree": deg, "certified": 2 * frac(G) >= deg}
        try:
            a = _sum_render(A, Region.AT_INFINITY, q_max, G)
            b = _sum_render(B, Region.AT_ZERO, q_max, G)
        except WindowExceeded as exc:
            out.append(Verdict("recursion", params, False, None, dict(details, reason=str(exc))))
            continue
        details["terms"] = len(b)
        diff = a.first_difference(b)
        if diff is not None:
            mm, h, x, y = diff
            out.append(Verdict("recursion", params, False, Verdict.violation(mm, h, x, y, j), details))
        elif not details["certified"]:
            out.append(Verdict("recursion", params, False, None, dict(details, reason="window too narrow")))
        else:
            out.append(Verdict("recursion", params, True, None, details))
    if chain:
        out.append(chain_check(m, i, p, q_max, levels=levels))
        fi = bx.R_from_F_V(i)[0]
        bad = None
        for c in m.components:
            v = check_prop_3_1(c, p, fi, q_max, G)
            if not v.passed:
                bad = v
                break
        params = {"manifold": m.name, "op": name, "p": p, "q_max": q_max, "g_window": G}
        out.append(Verdict("integral_shift", params, bad is None,
                           None if bad is None else dict(bad.first_violation or {}, component=bad.params["component"]),
                           {"components": len(m.components)}))
    return out


def _slanted(fls: Sequence[FactorList], t: Fraction, q_max: Rat, G: Rat) -> tuple[dict, Fraction]:
    """Coefficients in original coordinates of an expansion at interior slope t."""
    ser = _sum_render(fls, Region.AT_ZERO, q_max, G)
    return {(mm - t * h, h): k for mm, h, k in ser.items()}, ser.q_max


def chain_check(m: ManifoldDatum, op, p: int, q_max: Rat = 2, G: Rat = 12,
                levels: Sequence[Level] | None = None, j0: int = 0, j1: int | None = None) -> Verdict:
    """Compare levels j0 and j1 directly, each expanded inside its own slope range.

    Level j lives on slopes ``(p-1+beta_j, p-1+beta_{j+1})``; the comparison
    covers every (m, h) certified by both expansions.  With the defaults this
    is the relation between F^{-p+1} and F^{-p}.
    """
    m, i, name = _resolve_op(m, op)
    if levels is None:
        levels = phi_levels(m.weight_set)
    J0 = len(levels)
    j1 = J0 if j1 is None else j1
    betas = [Fraction(0)] + [lv.beta for lv in levels] + [1 + levels[0].beta]

    def mid(j):
        return p - 1 + (betas[j] + betas[j + 1]) / 2

    t0, t1 = mid(j0), mid(j1)
    extra = frac(G) * max(t0, t1)
    A, qa = _slanted(_side(m, i, p, j0, levels, q_max + extra, t0), t0, q_max + extra, G)
    B, qb = _slanted(_side(m, i, p, j1, levels, q_max + extra, t1), t1, q_max + extra, G)
    params = {"manifold": m.name, "op": name, "p": p, "from": j0, "to": j1, "q_max": q_max, "g_window": G}

    def certified(mm, h):
        return mm + t0 * h <= qa and mm + t1 * h <= qb and abs(h) <= G

    checked = 0
    for key in sorted(set(A) | set(B)):
        if not certified(*key):
            continue
        checked += 1
        x, y = A.get(key, 0), B.get(key, 0)
        if x != y:
            return Verdict("chain", params, False, Verdict.violation(key[0], key[1], x, y), {"slopes": [t0, t1]})
    return Verdict("chain", params, True, None, {"slopes": [t0, t1], "checked_terms": checked})


def translation_check(m: ManifoldDatum, op, p: int, q_max: Rat = 3, G: Rat = 40,
                      e_override: Rat | None = None) -> Verdict:
    """``a_{m,h} = a_{m + p h + p^2 e, h + 2 p e}`` for the certified global index.

    Every lattice point of the window whose image is also known (inside
    the window, or below the q-floor where the index vanishes) is compared.
    ``e_override`` replaces the computed e (negative control).
    """
    from .anomaly import compute_e
    from .errors import NotPolynomial
    from .localization import operator, total_index

    op = operator(op) if isinstance(op, str) else op
    params = {"manifold": m.name, "op": op.name, "p": p, "q_max": q_max, "g_window": G}
    if e_override is None:
        info = compute_e(m)
        if info.e is None:
            return Verdict("translation", params, False, None,
                           {"reason": "e is not constant over the fixed points"})
        e = info.e
    else:
        e = frac(e_override)
    try:
        ser = total_index(m, op, q_max, G).series
    except NotPolynomial as exc:
        return Verdict("translation", params, False, None, {"reason": str(exc)})
    lq, lg = ser.lattice_q, ser.lattice_g
    nz = {(mm, h): k for mm, h, k in ser.items()}

    def value(mm, h):
        if mm < ser.q_floor:
            return 0
        if mm > ser.q_max or abs(h) > ser.g_window:
            return None
        return nz.get((mm, h), 0)

    checked = 0
    lo = floor(ser.q_floor * lq)
    for i in range(lo, floor(ser.q_max * lq) + 1):
        mm = Fraction(i, lq)
        for k in range(-floor(ser.g_window * lg), floor(ser.g_window * lg) + 1):
            h = Fraction(k, lg)
            tm, th = mm + p * h + p * p * e, h + 2 * p * e
            a, b = value(mm, h), value(tm, th)
            if b is None:
                continue
            checked += 1
            if a != b:
                return Verdict("translation", params, False, Verdict.violation(mm, h, a, b),
                               {"e": e, "target": [tm, th]})
    return Verdict("translation", params, True, None, {"e": e, "checked_terms": checked})
