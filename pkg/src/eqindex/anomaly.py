"""Hypothesis checks on fixed-point data.

Parities of the weight sums, the anomaly constant ``e``, the decomposition
of the normal data under a finite cyclic subgroup ``Z_n`` of the circle,
and the constancy of the level constants over the points that share a
``Z_n``-fixed component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import NamedTuple, Sequence

from .bundle_expr import Level, phi_levels
from .datum import FixedComponentDatum, ManifoldDatum
from .shifts import epsilon, level_constants

__all__ = [
    "HypothesisReport", "EInfo", "check_parities", "compute_e", "hypotheses", "ZnTable", "zn_decompose",
    "epsilon_closed", "mu", "ConstancyResult", "constancy_checks", "constancy_details",
]


def _parity_N(c: FixedComponentDatum) -> bool:
    return c.d_N % 2 == 0


def _parity_V(c: FixedComponentDatum) -> bool:
    return c.d_V % 2 == 0


def check_parities(m: ManifoldDatum) -> tuple[bool, bool]:
    """Whether ``sum v dim N_v`` and ``sum v dim V_v`` are even at every point."""
    return all(_parity_N(c) for c in m.components), all(_parity_V(c) for c in m.components)


@dataclass(frozen=True)
class EInfo:
    values: tuple[Fraction, ...]
    e: Fraction | None

    @property
    def constant(self) -> bool:
        return self.e is not None

    @property
    def integral(self) -> bool:
        return self.e is not None and self.e.denominator == 1


def compute_e(m: ManifoldDatum) -> EInfo:
    """``(e(V) - e(N)) / 2`` at each point, and its common value if constant."""
    vals = tuple(Fraction(c.e_V - c.e_N, 2) for c in m.components)
    return EInfo(vals, vals[0] if vals and len(set(vals)) == 1 else None)


@dataclass
class HypothesisReport:
    parity_N: bool
    parity_V: bool
    e: EInfo
    declared_e_matches: bool | None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"parity_N": self.parity_N, "parity_V": self.parity_V,
                "e_values": [str(v) for v in self.e.values],
                "e": None if self.e.e is None else str(self.e.e), "e_integral": self.e.integral,
                "declared_e_matches": self.declared_e_matches, "failures": list(self.failures)}


def hypotheses(m: ManifoldDatum) -> HypothesisReport:
    pn, pv = check_parities(m)
    info = compute_e(m)
    failures = []
    if not pn:
        failures.append("sum v dim N_v is odd at some point")
    if not pv:
        failures.append("sum v dim V_v is odd at some point")
    if not info.constant:
        failures.append("e is not constant over the fixed points")
    elif not info.integral:
        failures.append("e is not an integer")
    match = None
    if m.declared_e is not None:
        match = info.e == m.declared_e
        if not match:
            failures.append(f"declared e = {m.declared_e} differs from the computed value")
    return HypothesisReport(pn, pv, info, match, failures)


# ---------------------------------------------------------------------------
# Z_n decomposition


def _residues(dims: dict[int, int], n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for v, d in dims.items():
        out[v % n] = out.get(v % n, 0) + d
    return out


def _neg_count(weights: Sequence[int], n: int) -> int:
    """Signed weights w < 0 with |w| = n/2 mod n (conjugated half-period lines)."""
    if n % 2:
        return 0
    return sum(1 for w in weights if w < 0 and abs(w) % n == n // 2)


@dataclass(frozen=True)
class ZnTable:
    """Ranks of the ``Z_n`` isotypic pieces of TX and V at one point.

    ``N_blocks[v']`` (0 < v' < n/2) is the complex rank of the piece where
    the generator acts by ``exp(2 pi i v'/n)``; the half-period piece and
    the fixed pieces are real and reported by real dimension.
    """

    n: int
    N_blocks: tuple[tuple[int, int], ...]
    N_half_real: int
    TX_fixed_real: int
    V_blocks: tuple[tuple[int, int], ...]
    V_half_real: int
    V_fixed_real: int
    o_N: int
    o_V: int
    delta_N: int
    delta_V: int

    @property
    def r(self) -> int:
        return (1 + (-1) ** self.n) // 2

    def key(self) -> tuple:
        return (self.n, self.N_blocks, self.N_half_real, self.TX_fixed_real,
                self.V_blocks, self.V_half_real, self.V_fixed_real)

    def even_dims(self) -> bool:
        return self.TX_fixed_real % 2 == 0 and self.V_half_real % 2 == 0 and self.V_fixed_real % 2 == 0

    def total_N_real(self) -> int:
        return self.TX_fixed_real + self.N_half_real + 2 * sum(k for _, k in self.N_blocks)

    def total_V_real(self) -> int:
        return self.V_fixed_real + self.V_half_real + 2 * sum(k for _, k in self.V_blocks)


def zn_decompose(c: FixedComponentDatum, n: int) -> ZnTable:
    if n < 1:
        raise ValueError("n must be positive")
    NR, VR = _residues(c.n_dims, n), _residues(c.v_dims, n)

    def blocks(R):
        return tuple((v, R.get(v, 0) + R.get(n - v, 0)) for v in range(1, n) if 2 * v < n
                     if R.get(v, 0) + R.get(n - v, 0))

    half = (lambda R: 2 * R.get(n // 2, 0)) if n % 2 == 0 else (lambda R: 0)
    o_N = (_neg_count(c.tangent_weights, n) + c.o_N) % 2
    o_V = (_neg_count(c.v_weights, n) + c.o_V) % 2
    upper = lambda R: sum(k for v, k in R.items() if n < 2 * v < 2 * n)
    return ZnTable(n, blocks(NR), half(NR), 2 * NR.get(0, 0), blocks(VR), half(VR), c.v0_rank + 2 * VR.get(0, 0),
                   o_N, o_V, (upper(NR) + o_N) % 2, (upper(VR) + o_V) % 2)


def epsilon_closed(c: FixedComponentDatum, p: int, j: int, i: int, levels: Sequence[Level]) -> Fraction:
    """The level shift offset written through the ``Z_n`` ranks only.

    Agrees with :func:`eqindex.shifts.epsilon`; it depends on the point
    only through ``e`` and the table of :func:`zn_decompose`.
    """
    b = levels[j - 1].beta
    pj, n = b.numerator, b.denominator
    s = p - 1 + b
    t = zn_decompose(c, n)
    e = Fraction(c.e_V - c.e_N, 2)
    NB, VB = dict(t.N_blocks), dict(t.V_blocks)
    om = lambda v: (pj * v) % n
    lower = [v for v in range(1, n) if 2 * v < n]
    e1 = (s * s * e - Fraction(t.N_half_real - t.V_half_real, 16)
          - Fraction(1, 2) * sum(((NB.get(v, 0) - VB.get(v, 0)) * Fraction(om(v) * (n - om(v)), n * n)
                                  for v in lower), Fraction(0)))
    if i == 1:
        return e1
    x = lambda v: Fraction(pj * v, n)
    t1 = sum((VB.get(v, 0) * Fraction(om(v), n) for mm in range(pj) for v in lower
              if mm < x(v) < mm + Fraction(1, 2)), Fraction(0))
    t2 = sum((VB.get(v, 0) * Fraction(n - om(v), n) for mm in range(1, pj + 1) for v in lower
              if mm - Fraction(1, 2) < x(v) < mm), Fraction(0))
    return e1 - t1 / 2 - t2 / 2 - Fraction(t.V_half_real, 8)


def mu(c: FixedComponentDatum, j: int, i: int, levels: Sequence[Level]) -> int:
    """Parity of the grading change under the level-j shift (i = 1, 2 for tau_e, 3 for tau_s)."""
    b = levels[j - 1].beta
    t = zn_decompose(c, b.denominator)
    if i == 1:
        return (-sum(floor(b * u) * d for u, d in c.v_dims.items()) + t.delta_N + t.delta_V) % 2
    if i == 2:
        return (-sum(floor(b * u + Fraction(1, 2)) * d for u, d in c.v_dims.items()) + t.delta_N + t.o_V) % 2
    if i == 3:
        return t.delta_N % 2
    raise ValueError("i must be 1, 2 or 3")


class ConstancyResult(NamedTuple):
    epsilon_constant: bool
    parity_constant: bool


def constancy_details(m: ManifoldDatum, p: int, j: int, levels: Sequence[Level] | None = None) -> dict:
    """Per-group values of eps and of ``d'(beta_j, N) + mu_i`` mod 2.

    Points are grouped by identical ``Z_n`` tables, which stands in for
    lying on a common component of the ``Z_n``-fixed set.
    """
    if levels is None:
        levels = phi_levels(m.weight_set)
    n = levels[j - 1].n
    groups: dict[tuple, list[FixedComponentDatum]] = {}
    for c in m.components:
        groups.setdefault(zn_decompose(c, n).key(), []).append(c)
    out = {"n": n, "groups": [], "formula_agrees": True, "epsilon_constant": True, "parity_constant": True,
           "v_parity_constant": True}
    for members in groups.values():
        eps = {i: [] for i in (1, 2)}
        par = {i: [] for i in (1, 2, 3)}
        vpar = []
        for c in members:
            dp = level_constants(c, p, j, levels).d_prime
            for i in (1, 2):
                direct, closed = epsilon(c, p, j, i, levels), epsilon_closed(c, p, j, i, levels)
                if direct != closed:
                    out["formula_agrees"] = False
                eps[i].append(direct)
            for i in (1, 2, 3):
                par[i].append((dp + mu(c, j, i, levels)) % 2)
            t = zn_decompose(c, n)
            vpar.append((sum(floor(levels[j - 1].beta * u) * d for u, d in c.v_dims.items()) + t.delta_V) % 2)
        e_ok = all(len(set(v)) == 1 for v in eps.values())
        p_ok = all(len(set(v)) == 1 for v in par.values())
        out["epsilon_constant"] &= e_ok
        out["parity_constant"] &= p_ok
        out["v_parity_constant"] &= len(set(vpar)) == 1
        out["groups"].append({"members": [c.name for c in members],
                              "epsilon": {i: [str(x) for x in v] for i, v in eps.items()},
                              "parity": par})
    return out


def constancy_checks(m: ManifoldDatum, p: int, j: int, levels: Sequence[Level] | None = None) -> ConstancyResult:
    d = constancy_details(m, p, j, levels)
    return ConstancyResult(d["epsilon_constant"] and d["formula_agrees"], d["parity_constant"])
