"""Fixed-point contributions, global indices and the dual-expansion certificate.

At an isolated fixed point the index of a twisted Dirac operator localizes
to a rational function of g.  Summing the expansions of all contributions
in one region gives the global equivariant index; agreement of the two
regions on a wide enough window proves the sum is a Laurent polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, NamedTuple

from . import bundle_expr as bx
from .datum import FixedComponentDatum, ManifoldDatum
from .errors import IncompatibleTwist, NotPolynomial, WindowExceeded
from .ring import BigradedSeries, Character, FactorList, Rat, Region, frac, g_range, render
from .verdict import Verdict

__all__ = [
    "FixedComponentDatum", "ManifoldDatum", "OperatorSpec", "OPERATORS", "operator",
    "point_contribution", "total_index", "TailReport", "IndexResult", "dual_expansion_check",
    "extract_ind", "rigidity_check", "vanishing_check", "DEFAULT_Q_MAX", "DEFAULT_G",
]

DEFAULT_Q_MAX = 3
DEFAULT_G = 40

BASES = ("dirac", "signature", "spinc_s", "spinc_e")
TWISTS = ("none", "W", "sym", "theta_q", "theta_minus_q", "theta_prime", "theta_star",
          "R1", "R2", "R3", "R4", "custom")


@dataclass(frozen=True)
class OperatorSpec:
    """A Dirac-type operator: base operator and twisting bundle."""

    name: str
    base: str
    twist: str = "none"
    custom: Callable[[FixedComponentDatum], bx.BundleExpr] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.base not in BASES:
            raise IncompatibleTwist(f"unknown base operator {self.base!r}")
        if self.twist not in TWISTS:
            raise IncompatibleTwist(f"unknown twist {self.twist!r}")
        if self.base.startswith("spinc") and self.twist not in ("none", "W"):
            raise IncompatibleTwist("Spin^c operators take no bundle twist here")
        if (self.twist == "custom") != (self.custom is not None):
            raise IncompatibleTwist("a custom twist needs a builder, and only a custom twist takes one")

    @property
    def uses_v(self) -> bool:
        return self.twist in ("R1", "R2", "R3", "R4")


OPERATORS: dict[str, OperatorSpec] = {op.name: op for op in [
    OperatorSpec("dirac", "dirac"),
    OperatorSpec("signature", "signature"),
    OperatorSpec("dirac-W", "dirac", "W"),
    OperatorSpec("dirac-sym", "dirac", "sym"),
    OperatorSpec("dirac-theta-q", "dirac", "theta_q"),
    OperatorSpec("dirac-theta-minus-q", "dirac", "theta_minus_q"),
    OperatorSpec("signature-theta-prime", "signature", "theta_prime"),
    OperatorSpec("dirac-theta-star", "dirac", "theta_star"),
    OperatorSpec("dirac-R1", "dirac", "R1"),
    OperatorSpec("dirac-R2", "dirac", "R2"),
    OperatorSpec("dirac-R3", "dirac", "R3"),
    OperatorSpec("dirac-R4", "dirac", "R4"),
    OperatorSpec("spinc-s", "spinc_s"),
    OperatorSpec("spinc-e", "spinc_e"),
]}

# operators rigid by the tangent-bundle theorem, and those needing the V hypothesis
TANGENT_RIGID = ("signature-theta-prime", "dirac-theta-q", "dirac-theta-minus-q")
V_RIGID = ("dirac-R1", "dirac-R2", "dirac-R3", "dirac-R4")


def operator(name: str | OperatorSpec) -> OperatorSpec:
    if isinstance(name, OperatorSpec):
        return name
    try:
        return OPERATORS[name]
    except KeyError:
        raise IncompatibleTwist(f"unknown operator {name!r}; known: {', '.join(OPERATORS)}") from None


def twist_expr(c: FixedComponentDatum, op: OperatorSpec) -> bx.BundleExpr:
    """The twisting bundle of ``op`` restricted to the point ``c``."""
    n = c.n_dims
    t = op.twist
    if t == "none":
        expr = bx.BundleExpr()
    elif t == "W":
        expr = bx.BundleExpr(character=c.w_character)
    elif t == "sym":
        expr = bx.sym_tower(n)
    elif t == "theta_q":
        expr = bx.theta_family("theta", n)
    elif t == "theta_minus_q":
        expr = bx.theta_family("theta_minus", n)
    elif t == "theta_prime":
        expr = bx.theta_family("theta_prime", n)
    elif t == "theta_star":
        # (S+ - S-)(TX) (x) Theta*_q(TX): R_2 of the tangent bundle
        expr = bx.sym_tower(n) * bx.R_V(2, n, 0, c.sigma)
    elif t in ("R1", "R2", "R3", "R4"):
        expr = bx.sym_tower(n) * bx.R_V(int(t[1]), c.v_dims, c.v0_rank, c.sigma_v)
    else:
        expr = op.custom(c)
    if op.base == "signature":
        expr = expr * bx.spinor(n)
    return expr


def point_expr(c: FixedComponentDatum, op: OperatorSpec | str) -> bx.BundleExpr:
    op = operator(op)
    sign = c.sigma * (-1) ** c.rank_N
    if op.base in ("spinc_s", "spinc_e"):
        if op.base == "spinc_s":
            expr = bx.spin_c_R(c, "+").scaled(2 ** c.p_prime)
        else:
            expr = bx.spin_c_R(c, "-").scaled(1 if c.p_prime == 0 else 0)
        if op.twist == "none":
            expr = replace(expr, character=Character.one())
        return expr.scaled(sign)
    plain = replace(c, w_character=Character.one())
    return (bx.witten_R(plain) * twist_expr(c, op)).scaled(sign)


def point_contribution(c: FixedComponentDatum, op: OperatorSpec | str,
                       q_max: Rat = DEFAULT_Q_MAX) -> FactorList:
    """Lefschetz contribution of the point ``c`` as a FactorList exact through ``q_max``."""
    return point_expr(c, op).evaluate(q_max)


def denominator_degree(fls: list[FactorList]) -> Fraction:
    """Degree of the product of all pure-g denominators."""
    return sum((abs(f.w) * -f.power for fl in fls for f in fl.pure_g_factors()), Fraction(0))


@dataclass
class TailReport:
    """Certificate that a summed index is a Laurent polynomial in g.

    ``dual_agree``: the AtZero and AtInfinity sums agree on |h| <= G.
    ``certified``: that agreement spans at least the denominator degree, which
    forces the two expansions to coincide everywhere.  ``support`` bounds the
    polynomial's g-support when certified.  ``band_zero`` records the simpler
    heuristic: all coefficients with |h| >= band_lo vanish.
    """

    q_max: Fraction
    window: Fraction
    denominator_degree: Fraction
    dual_agree: bool
    first_difference: tuple | None
    certified: bool
    support: tuple[Fraction, Fraction] | None
    support_visible: bool
    band_lo: Fraction
    band_zero: bool

    @property
    def ok(self) -> bool:
        return self.certified and self.band_zero

    def to_json(self) -> dict:
        return {
            "q_max": str(self.q_max), "window": str(self.window),
            "denominator_degree": str(self.denominator_degree), "dual_agree": self.dual_agree,
            "first_difference": None if self.first_difference is None else [str(x) for x in self.first_difference],
            "certified": self.certified,
            "support": None if self.support is None else [str(x) for x in self.support],
            "support_visible": self.support_visible, "band_lo": str(self.band_lo), "band_zero": self.band_zero,
        }


class IndexResult(NamedTuple):
    series: BigradedSeries
    tail: TailReport


def _sum(series: list[BigradedSeries], q_max: Fraction, G: Fraction) -> BigradedSeries:
    total = BigradedSeries.zero(q_max, G)
    for s in series:
        total = total + s
    return total


def total_index(m: ManifoldDatum, op: OperatorSpec | str, q_max: Rat = DEFAULT_Q_MAX,
                G: Rat = DEFAULT_G, region: Region = Region.AT_ZERO, strict: bool = True) -> IndexResult:
    """Sum of all fixed-point contributions expanded in ``region``.

    With ``strict`` a failed tail certificate raises NotPolynomial.
    """
    op = operator(op)
    q_max, G = frac(q_max), frac(G)
    fls = [point_contribution(c, op, q_max) for c in m.components]
    zero = _sum([render(fl, Region.AT_ZERO, q_max, G) for fl in fls], q_max, G)
    inf = _sum([render(fl, Region.AT_INFINITY, q_max, G) for fl in fls], q_max, G)
    diff = zero.first_difference(inf)
    deg = denominator_degree(fls)
    certified = diff is None and 2 * G >= deg
    lows = [g_range(fl, Region.AT_ZERO, q_max) for fl in fls]
    highs = [g_range(fl, Region.AT_INFINITY, q_max) for fl in fls]
    lows = [r[0] for r in lows if r is not None]
    highs = [r[1] for r in highs if r is not None]
    support = None
    if certified:
        support = (min(lows), max(highs)) if lows else (Fraction(0), Fraction(0))
    visible = support is not None and support[0] >= -G and support[1] <= G
    vmax = max((v for c in m.components for v in c.n_dims), default=0)
    slack = max(Fraction(2 * vmax) * max(q_max, Fraction(1)), deg)
    band_lo = max(G - slack, Fraction(0))
    chosen = zero if region is Region.AT_ZERO else inf
    band_zero = all(abs(h) < band_lo for _, h, _ in chosen.items()) if band_lo > 0 else True
    tail = TailReport(q_max, G, deg, diff is None, diff, certified, support, visible, band_lo, band_zero)
    if strict and not tail.ok:
        where = f" first difference at (m, h) = ({diff[0]}, {diff[1]})" if diff else ""
        raise NotPolynomial(f"{m.name} / {op.name}: the summed index is not certified polynomial{where}")
    return IndexResult(chosen, tail)


def extract_ind(series: BigradedSeries, m: Rat, h: Rat) -> int:
    """The index coefficient a_{m,h}; raises WindowExceeded outside the window."""
    return series.extract(m, h)


def _params(m: ManifoldDatum, op: OperatorSpec, q_max, G) -> dict:
    return {"manifold": m.name, "op": op.name, "q_max": frac(q_max), "g_window": frac(G)}


def dual_expansion_check(m: ManifoldDatum, op: OperatorSpec | str, q_max: Rat = DEFAULT_Q_MAX,
                         G: Rat = DEFAULT_G) -> Verdict:
    """PASS iff the two expansion regions give the same series on the whole window
    and the window is wide enough to certify the agreement."""
    op = operator(op)
    _, tail = total_index(m, op, q_max, G, strict=False)
    params = _params(m, op, q_max, G)
    if not tail.dual_agree:
        m0, h0, a, b = tail.first_difference
        return Verdict("dual_expansion", params, False, Verdict.violation(m0, h0, a, b),
                       {"reason": "expansions disagree", "tail": tail.to_json()})
    if not tail.certified:
        return Verdict("dual_expansion", params, False, None,
                       {"reason": "window narrower than the denominator degree", "tail": tail.to_json()})
    return Verdict("dual_expansion", params, True, None, {"tail": tail.to_json()})


def _certified_index(check: str, m, op, q_max, G) -> tuple[IndexResult | None, Verdict | None]:
    try:
        res = total_index(m, op, q_max, G)
    except NotPolynomial as exc:
        return None, Verdict(check, _params(m, op, q_max, G), False, None, {"reason": f"not polynomial: {exc}"})
    if not res.tail.support_visible:
        return None, Verdict(check, _params(m, op, q_max, G), False, None,
                             {"reason": "polynomial support exceeds the window", "tail": res.tail.to_json()})
    return res, None


def rigidity_check(m: ManifoldDatum, op: OperatorSpec | str, q_max: Rat = DEFAULT_Q_MAX,
                   G: Rat = DEFAULT_G) -> Verdict:
    """PASS iff every q-coefficient of the index is a multiple of the trivial character."""
    op = operator(op)
    res, bad = _certified_index("rigidity", m, op, q_max, G)
    if bad is not None:
        return bad
    per_m = {}
    for mm in [Fraction(k, 2) for k in range(0, int(2 * frac(q_max)) + 1)]:
        per_m[str(mm)] = str(res.series.extract_coefficient(mm))
    for mm, h, c in res.series.items():
        if h != 0:
            return Verdict("rigidity", _params(m, op, q_max, G), False, Verdict.violation(mm, h, c, 0),
                           {"coefficients": per_m})
    return Verdict("rigidity", _params(m, op, q_max, G), True, None, {"coefficients": per_m})


def vanishing_check(m: ManifoldDatum, op: OperatorSpec | str, q_max: Rat = DEFAULT_Q_MAX,
                    G: Rat = DEFAULT_G) -> Verdict:
    """PASS iff the index vanishes identically through ``q_max``."""
    op = operator(op)
    res, bad = _certified_index("vanishing", m, op, q_max, G)
    if bad is not None:
        return bad
    for mm, h, c in res.series.items():
        return Verdict("vanishing", _params(m, op, q_max, G), False, Verdict.violation(mm, h, c, 0))
    return Verdict("vanishing", _params(m, op, q_max, G), True)
