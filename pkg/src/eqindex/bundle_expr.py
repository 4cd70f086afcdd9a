"""Weight-graded bundle expressions at an isolated fixed point.

An expression is a product of weight atoms (symmetric and exterior power
towers, single factors, determinant lines) times a finite character.  At a
point every bundle is a sum of weight lines, so evaluation produces a
:class:`~eqindex.ring.FactorList`.  ``g`` is the circle variable and ``q``
the loop grading throughout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import floor
from typing import Iterable, Mapping, Sequence

from .errors import EmptyWeightSet, InvalidGrading, InvalidLevel, MissingSpinCData, ZeroWeight
from .ring import Character, Factor, FactorList, Rat, frac

Dims = Mapping[int, int]


class AtomKind(enum.Enum):
    SYM_TOWER = "Sym"
    LAMBDA_TOWER = "Lambda"
    SYM_SINGLE = "Sym1"
    LAMBDA_SINGLE = "Lambda1"
    DET = "det"
    LINE = "line"


class Grading(enum.Enum):
    TAU_S = "tau_s"
    TAU_E = "tau_e"


@dataclass(frozen=True)
class WeightAtom:
    """One tensor factor attached to a weight line of rank ``rank``.

    Towers run over q-degrees ``q_offset + k*q_step`` for k = 0..count-1
    (``count=None`` means k = 0, 1, 2, ...).  ``sign_variant`` selects
    ``Lambda_{+t}`` (+1) or ``Lambda_{-t}`` (-1).  DET and LINE atoms are
    monomials ``q^{q_offset*rank} g^{w*rank}``; for them ``rank`` may be
    negative.  ``tag`` marks atoms built from V so gradings can find them.
    """

    kind: AtomKind
    weight: Fraction
    rank: int = 1
    q_offset: Fraction = Fraction(0)
    q_step: Fraction = Fraction(1)
    count: int | None = 1
    conjugated: bool = False
    sign_variant: int = 1
    tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "weight", frac(self.weight))
        object.__setattr__(self, "q_offset", frac(self.q_offset))
        object.__setattr__(self, "q_step", frac(self.q_step))
        if self.kind in (AtomKind.SYM_TOWER, AtomKind.LAMBDA_TOWER):
            if self.q_step <= 0:
                raise ValueError("tower step must be positive")
        elif self.kind in (AtomKind.SYM_SINGLE, AtomKind.LAMBDA_SINGLE):
            object.__setattr__(self, "count", 1)
        if self.kind not in (AtomKind.DET, AtomKind.LINE) and self.rank <= 0:
            raise ValueError("rank must be positive")
        if self.sign_variant not in (1, -1):
            raise ValueError("sign_variant must be +1 or -1")

    @property
    def w(self) -> Fraction:
        """Effective g-weight after conjugation."""
        return -self.weight if self.conjugated else self.weight

    @property
    def is_monomial(self) -> bool:
        return self.kind in (AtomKind.DET, AtomKind.LINE)

    @property
    def is_infinite(self) -> bool:
        return not self.is_monomial and self.count is None

    def degrees(self) -> Iterable[Fraction]:
        k = 0
        while self.count is None or k < self.count:
            yield self.q_offset + k * self.q_step
            k += 1

    def sort_key(self) -> tuple:
        return (self.kind.value, self.weight, self.conjugated, self.q_offset, self.q_step,
                -1 if self.count is None else self.count, self.rank, self.sign_variant, self.tag)

    def factor_at(self, a: Fraction) -> Factor:
        if self.kind in (AtomKind.SYM_TOWER, AtomKind.SYM_SINGLE):
            return Factor(a, self.w, -self.rank, 1)
        return Factor(a, self.w, self.rank, -self.sign_variant)

    def monomial(self) -> tuple[Fraction, Fraction]:
        return self.q_offset * self.rank, self.w * self.rank

    def pretty(self) -> str:
        w = self.w
        line = f"[{w}]" + (f"^{self.rank}" if self.rank != 1 else "")
        if self.kind is AtomKind.DET:
            return f"det{line}"
        if self.kind is AtomKind.LINE:
            return f"q^{self.q_offset * self.rank}{line}"
        name = "Sym" if self.kind in (AtomKind.SYM_TOWER, AtomKind.SYM_SINGLE) else (
            "Lambda+" if self.sign_variant == 1 else "Lambda-")
        if self.count == 1:
            return f"{name}_q^{self.q_offset}({line})"
        end = "inf" if self.count is None else str(self.q_offset + (self.count - 1) * self.q_step)
        return f"{name}_q^{{{self.q_offset}..{end} step {self.q_step}}}({line})"


@dataclass(frozen=True)
class SpinorFactor:
    """The spinor character S(V) at a point, graded by tau_s or tau_e.

    tau_s gives ``2^{p'} prod_u (g^{u/2} + g^{-u/2})^{dim V_u}``; tau_e gives
    ``[p' = 0] sigma_V prod_u (g^{-u/2} - g^{u/2})^{dim V_u}``.
    """

    v_dims: tuple[tuple[int, int], ...]
    v0_rank: int = 0
    sigma_v: int = 1
    grading: Grading = Grading.TAU_S

    def factor_list(self) -> FactorList:
        d = sum((Fraction(u * k) for u, k in self.v_dims), Fraction(0))
        p = self.v0_rank // 2
        if self.grading is Grading.TAU_S:
            return FactorList({(0, -d / 2): 2 ** p}, [Factor(0, u, k, -1) for u, k in self.v_dims])
        if p > 0:
            return FactorList({})
        return FactorList({(0, -d / 2): self.sigma_v}, [Factor(0, u, k, 1) for u, k in self.v_dims])


@dataclass(frozen=True)
class BundleExpr:
    """Product of weight atoms, an optional spinor factor and a finite character."""

    atoms: tuple[WeightAtom, ...] = ()
    q_exp: Fraction = Fraction(0)
    g_exp: Fraction = Fraction(0)
    coeff: int = 1
    character: Character = field(default_factory=Character.one)
    spinor: SpinorFactor | None = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(sorted(self.atoms, key=WeightAtom.sort_key)))
        object.__setattr__(self, "q_exp", frac(self.q_exp))
        object.__setattr__(self, "g_exp", frac(self.g_exp))

    @classmethod
    def one(cls) -> "BundleExpr":
        return cls()

    def __mul__(self, other: "BundleExpr") -> "BundleExpr":
        if self.spinor is not None and other.spinor is not None:
            raise ValueError("an expression carries at most one spinor factor")
        return BundleExpr(self.atoms + other.atoms, self.q_exp + other.q_exp, self.g_exp + other.g_exp,
                          self.coeff * other.coeff, self.character * other.character,
                          self.spinor or other.spinor)

    def scaled(self, coeff: int = 1, q: Rat = 0, g: Rat = 0) -> "BundleExpr":
        return replace(self, coeff=self.coeff * coeff, q_exp=self.q_exp + frac(q), g_exp=self.g_exp + frac(g))

    def with_character(self, ch: Character) -> "BundleExpr":
        return replace(self, character=self.character * ch)

    def evaluate(self, q_max: Rat, slope: Rat = 0, q_offset: Rat = 0) -> FactorList:
        """FactorList of ``q^{q_offset} E(q, q^slope g)``, exact through ``q_max``.

        Tower factors whose effective q-degree exceeds the remaining budget are
        dropped; each is ``1 + O(q^{>budget})`` so nothing below ``q_max`` moves.
        """
        q_max, s = frac(q_max), frac(slope)
        base = FactorList.from_character(self.character) * FactorList.monomial(self.q_exp, self.g_exp, self.coeff)
        if self.spinor is not None:
            base = base * self.spinor.factor_list()
        fixed: list[Factor] = []
        pending: list[tuple[WeightAtom, Fraction]] = []
        for atom in self.atoms:
            if atom.is_monomial:
                q, g = atom.monomial()
                base = base * FactorList.monomial(q, g)
                continue
            for a in atom.degrees():
                a_eff = a + s * atom.w
                if a_eff <= 0:
                    fixed.append(atom.factor_at(a))
                    continue
                if atom.is_infinite:
                    pending.append((atom, a))
                    break
                pending.append((atom, a))
        core = (base * FactorList({(0, 0): 1}, fixed)).substitute(slope=s, q_offset=q_offset)
        budget = max(q_max - core.q_floor(), Fraction(0))
        extra: list[Factor] = []
        for atom, a in pending:
            if atom.is_infinite:
                n = a
                while n + s * atom.w <= budget:
                    extra.append(atom.factor_at(n))
                    n += atom.q_step
            elif a + s * atom.w <= budget:
                extra.append(atom.factor_at(a))
        return core * FactorList({(0, 0): 1}, extra).substitute(slope=s)

    def pretty(self) -> str:
        parts = []
        if self.coeff != 1:
            parts.append(str(self.coeff))
        if self.q_exp or self.g_exp:
            parts.append(f"q^{self.q_exp} g^{self.g_exp}")
        if self.character != Character.one():
            parts.append(f"({self.character!r})")
        if self.spinor is not None:
            sign = "+" if self.spinor.grading is Grading.TAU_S else "-"
            parts.append(f"(S+ {sign} S-)(V)")
        parts.extend(a.pretty() for a in self.atoms)
        return " (x) ".join(parts) if parts else "1"

    __str__ = pretty


# ---------------------------------------------------------------------------
# elementary builders


def _dims(d: Dims) -> list[tuple[int, int]]:
    return sorted((int(v), int(k)) for v, k in d.items() if k)


def sym_tower(dims: Dims, start: Rat = 1, step: Rat = 1, real: bool = True, count: int | None = None,
              conjugated: bool = False) -> BundleExpr:
    """Tensor product over n of Sym_{q^n} of the weight lines in ``dims``.

    ``real=True`` treats the data as a real bundle, adding the conjugate lines.
    """
    atoms = []
    for v, k in _dims(dims):
        atoms.append(WeightAtom(AtomKind.SYM_TOWER, v, k, start, step, count, conjugated))
        if real:
            atoms.append(WeightAtom(AtomKind.SYM_TOWER, v, k, start, step, count, not conjugated))
    return BundleExpr(tuple(atoms))


def lambda_tower(dims: Dims, sign: int, start: Rat = 1, step: Rat = 1, real: bool = True,
                 zero_rank: int = 0, count: int | None = None, tag: str = "") -> BundleExpr:
    """Tensor product over n of Lambda_{sign q^n}; ``zero_rank`` adds weight-0 lines."""
    atoms = []
    for v, k in _dims(dims):
        atoms.append(WeightAtom(AtomKind.LAMBDA_TOWER, v, k, start, step, count, False, sign, tag))
        if real:
            atoms.append(WeightAtom(AtomKind.LAMBDA_TOWER, v, k, start, step, count, True, sign, tag))
    if zero_rank:
        atoms.append(WeightAtom(AtomKind.LAMBDA_TOWER, 0, zero_rank, start, step, count, False, sign, tag))
    return BundleExpr(tuple(atoms))


def sym_single(v: int, rank: int, q_deg: Rat = 0, conjugated: bool = False) -> WeightAtom:
    return WeightAtom(AtomKind.SYM_SINGLE, v, rank, q_deg, conjugated=conjugated)


def det_line(v: int, rank: int, power: int = 1) -> WeightAtom:
    return WeightAtom(AtomKind.DET, v, rank * power)


# ---------------------------------------------------------------------------
# Witten bundles and R_i(V)

THETA_KINDS = ("theta_prime", "theta", "theta_minus", "theta_star")


def theta_family(kind: str, tangent: Dims, vbundle: Dims | None = None, v0_rank: int = 0) -> BundleExpr:
    """Theta'_q, Theta_q, Theta_{-q} or Theta*_q of the tangent data.

    With ``vbundle`` the exterior-power towers run over V instead of TX.
    Towers are infinite; truncation happens in :meth:`BundleExpr.evaluate`.
    """
    lam_dims, zr = (tangent, 0) if vbundle is None else (vbundle, v0_rank)
    if kind == "theta_prime":
        lam = lambda_tower(lam_dims, +1, 1, zero_rank=zr, tag="V")
    elif kind == "theta":
        lam = lambda_tower(lam_dims, -1, Fraction(1, 2), zero_rank=zr, tag="V")
    elif kind == "theta_minus":
        lam = lambda_tower(lam_dims, +1, Fraction(1, 2), zero_rank=zr, tag="V")
    elif kind == "theta_star":
        lam = lambda_tower(lam_dims, -1, 1, zero_rank=zr, tag="V")
    else:
        raise ValueError(f"unknown theta kind {kind!r}")
    return lam * sym_tower(tangent)


def spinor(v_dims: Dims, v0_rank: int = 0, sigma_v: int = 1,
           grading: Grading = Grading.TAU_S) -> BundleExpr:
    return BundleExpr(spinor=SpinorFactor(tuple(_dims(v_dims)), v0_rank, sigma_v, grading))


def R_V(i: int, v_dims: Dims, v0_rank: int = 0, sigma_v: int = 1) -> BundleExpr:
    """R_1..R_4 of V at a point."""
    if i == 1:
        return spinor(v_dims, v0_rank, sigma_v) * lambda_tower(v_dims, +1, 1, zero_rank=v0_rank, tag="V")
    if i == 2:
        return (spinor(v_dims, v0_rank, sigma_v, Grading.TAU_E)
                * lambda_tower(v_dims, -1, 1, zero_rank=v0_rank, tag="V"))
    if i == 3:
        return lambda_tower(v_dims, -1, Fraction(1, 2), zero_rank=v0_rank, tag="V")
    if i == 4:
        return lambda_tower(v_dims, +1, Fraction(1, 2), zero_rank=v0_rank, tag="V")
    raise ValueError("R_i is defined for i = 1..4")


def grading_sign(expr: BundleExpr, grading: Grading | str) -> BundleExpr:
    """Evaluate with the given Z_2-grading.

    tau_s leaves the expression alone.  tau_e turns the spinor character into
    the supercharacter and every V-exterior power into its graded version.
    """
    grading = Grading(grading)
    if grading is Grading.TAU_S:
        return expr
    if expr.spinor is None:
        raise InvalidGrading("tau_e needs an expression with a spinor factor")
    flip = {+1: -1, -1: +1}
    atoms = tuple(replace(a, sign_variant=flip[a.sign_variant]) if a.tag == "V" and not a.is_monomial else a
                  for a in expr.atoms)
    sp = replace(expr.spinor, grading=Grading.TAU_E if expr.spinor.grading is Grading.TAU_S else Grading.TAU_S)
    return replace(expr, atoms=atoms, spinor=sp)


def tau_e_shift_sign(v_dims: Dims, p: int) -> int:
    """Sign picked up by the tau_e grading under the shift by p."""
    return (-1) ** (sum(p * u * k for u, k in v_dims.items()) % 2)


# ---------------------------------------------------------------------------
# fixed-point denominators


def witten_R(component, primed: bool = False) -> BundleExpr:
    """The normal factor of the fixed-point formula, with q read as g.

    Unprimed: ``g^{d'/2} prod_v (1 - g^v)^{-dim N_v}`` times W (expand at 0).
    Primed:   ``g^{-d'/2} prod_v (1 - g^{-v})^{-dim N_v}`` times W (expand at infinity).
    """
    dims = component.n_dims
    d = Fraction(sum(v * k for v, k in dims.items()))
    atoms = tuple(sym_single(v, k, 0, conjugated=primed) for v, k in _dims(dims))
    return BundleExpr(atoms, 0, -d / 2 if primed else d / 2, 1, component.w_character)


def spin_c_R(component, sign: int | str, primed: bool = False) -> BundleExpr:
    """R_+ or R_- of the Spin^c fixed-point formula (V weights taken as given)."""
    if component.l_c is None:
        raise MissingSpinCData(f"component {component.name!r} has no l_c")
    s = {"+": 1, "-": -1, 1: 1, -1: -1}[sign]
    base = witten_R(component, primed)
    signed_v = Fraction(sum(component.v_weights))
    atoms = tuple(WeightAtom(AtomKind.LAMBDA_SINGLE, u, 1, 0, sign_variant=s, tag="V")
                  for u in component.v_weights)
    return replace(base * BundleExpr(atoms), g_exp=base.g_exp - signed_v / 2 + Fraction(component.l_c, 2))


def normal_modes(weights: Sequence[int], sign: int | str = "+", g_max: int = 20) -> Character:
    """Character of the L^2 normal-mode space for the weights, truncated at |h| <= g_max.

    For sign + the modes have weights ``sum_{neg} k_i |l_i| + sum_{pos} (k_i+1) |l_i|``
    with k_i >= 0; sign - is the mirror image of the + modes of ``-weights``.
    """
    if any(w == 0 for w in weights):
        raise ZeroWeight("normal modes need nonzero weights")
    s = {"+": 1, "-": -1, 1: 1, -1: -1}[sign]
    if s == -1:
        return normal_modes([-w for w in weights], "+", g_max).mirror()
    terms: dict[int, int] = {sum(w for w in weights if w > 0): 1}
    for w in weights:
        a = abs(w)
        nxt: dict[int, int] = {}
        for e, c in terms.items():
            k = e
            while k <= g_max:
                nxt[k] = nxt.get(k, 0) + c
                k += a
        terms = nxt
    return Character({e: c for e, c in terms.items() if e <= g_max})


# ---------------------------------------------------------------------------
# levels and the towers F_p, F'_p, F_{p,j}


@dataclass(frozen=True)
class Level:
    beta: Fraction
    p: int
    n: int


def phi_levels(weights: Iterable[int]) -> list[Level]:
    """All beta in (0, 1] with beta*v integral for some weight v, increasing."""
    J = sorted({int(v) for v in weights})
    if not J:
        raise EmptyWeightSet("the weight set is empty")
    if J[0] <= 0:
        raise ZeroWeight("weights must be positive")
    betas = {Fraction(k, v) for v in J for k in range(1, v + 1)}
    return [Level(b, b.numerator, b.denominator) for b in sorted(betas)]


def level_beta(levels: Sequence[Level], j: int) -> Fraction:
    return Fraction(0) if j == 0 else levels[j - 1].beta


def F_p(dims: Dims, p: int) -> BundleExpr:
    atoms = []
    for v, k in _dims(dims):
        atoms.append(WeightAtom(AtomKind.SYM_TOWER, v, k, 1, 1, None))
        atoms.append(WeightAtom(AtomKind.SYM_TOWER, v, k, p * v + 1, 1, None, True))
    return BundleExpr(tuple(atoms))


def F_prime(dims: Dims, p: int) -> BundleExpr:
    atoms = []
    for v, k in _dims(dims):
        atoms.extend(sym_single(v, k, -n) for n in range(p * v + 1))
        atoms.append(det_line(v, k, p * v + 1))
    return BundleExpr(tuple(atoms))


def F_minus(dims: Dims, p: int) -> BundleExpr:
    """F^{-p} = F_p (x) F'_p; p = 0 gives F^0."""
    return F_p(dims, p) * F_prime(dims, p)


def F_level(dims: Dims, p: int, j: int, levels: Sequence[Level]) -> BundleExpr:
    """F_{p,j}, interpolating between F^{-p+1} (j = 0) and F^{-p} (j = J0)."""
    if p < 1:
        raise InvalidLevel("p must be positive")
    if not 0 <= j <= len(levels):
        raise InvalidLevel(f"level {j} outside 0..{len(levels)}")
    bj = level_beta(levels, j)
    atoms = []
    for v, k in _dims(dims):
        for n in range((p - 1) * v + 1, p * v + 1):
            t = Fraction(n, v) - (p - 1)
            if t <= bj:
                atoms.extend([sym_single(v, k, -n), det_line(v, k)])
            else:
                atoms.append(sym_single(v, k, n, conjugated=True))
    return F_p(dims, p) * F_prime(dims, p - 1) * BundleExpr(tuple(atoms))


def taubes_F(component, p: int, j: int | str = "full", levels: Sequence[Level] | None = None) -> BundleExpr:
    """F_{p,j} of the component; ``j="full"`` gives F^{-p}."""
    dims = component.n_dims
    if j == "full":
        return F_minus(dims, p)
    if levels is None:
        levels = phi_levels(dims) if dims else []
    return F_level(dims, p, int(j), levels)


def _first_positive(shift: Fraction) -> Fraction:
    """Smallest positive element of Z + shift."""
    r = shift - floor(shift)
    return r if r else Fraction(1)


def F_beta(dims: Dims, beta: Rat) -> BundleExpr:
    """F(beta) at a point: Sym over 0 < n in Z + beta v of N_v and over Z - beta v of conj N_v."""
    b = frac(beta)
    atoms = []
    for v, k in _dims(dims):
        atoms.append(WeightAtom(AtomKind.SYM_TOWER, v, k, _first_positive(b * v), 1, None))
        atoms.append(WeightAtom(AtomKind.SYM_TOWER, v, k, _first_positive(-b * v), 1, None, True))
    return BundleExpr(tuple(atoms))


def F_V_beta(v_dims: Dims, v0_rank: int, beta: Rat, i: int, grading: Grading | str) -> BundleExpr:
    """F^i_V(beta) at a point, tau_s ungraded and tau_e graded."""
    b, sgn = frac(beta), (1 if Grading(grading) is Grading.TAU_S else -1)
    half = Fraction(0) if i == 1 else Fraction(1, 2)
    atoms = []
    if v0_rank:
        atoms.append(WeightAtom(AtomKind.LAMBDA_TOWER, 0, v0_rank, _first_positive(half), 1, None,
                                sign_variant=sgn, tag="V"))
    for u, k in _dims(v_dims):
        atoms.append(WeightAtom(AtomKind.LAMBDA_TOWER, u, k, _first_positive(b * u + half), 1, None,
                                sign_variant=sgn, tag="V"))
        atoms.append(WeightAtom(AtomKind.LAMBDA_TOWER, u, k, _first_positive(-b * u + half), 1, None,
                                True, sgn, "V"))
    return BundleExpr(tuple(atoms))


def F_V(v_dims: Dims, v0_rank: int, i: int, grading: Grading | str, sigma_v: int = 1) -> BundleExpr:
    """F^1_V (spinor times integral towers) or F^2_V (half-integral towers)."""
    g = Grading(grading)
    if i == 1:
        return spinor(v_dims, v0_rank, sigma_v, g) * F_V_beta(v_dims, v0_rank, 0, 1, g)
    if i == 2:
        return F_V_beta(v_dims, v0_rank, 0, 2, g)
    raise ValueError("F^i_V is defined for i = 1, 2")


def R_from_F_V(i: int) -> tuple[int, Grading]:
    """R_i(V) as (index of F^i_V, grading)."""
    return {1: (1, Grading.TAU_S), 2: (1, Grading.TAU_E), 3: (2, Grading.TAU_E), 4: (2, Grading.TAU_S)}[i]


