"""Exact characters of S^1 and truncated bigraded (q, g) series.

Exponents are rationals stored as integer numerators over a lattice
denominator.  ``Character`` is a finite Laurent polynomial in ``g``;
``BigradedSeries`` is a truncated series in ``q`` with character
coefficients, certified exact for ``m <= q_max`` and ``|h| <= g_window``.
``FactorList`` is a lazy product of a finite prefactor and binomial
factors ``(1 - sign q^a g^w)^power``; :func:`render` expands it in one of
the two regions.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _sweep_py
from .errors import InvalidLattice, NotRenderable, SingularFactor, WindowExceeded

try:  # compiled core; the pure-Python sweeps are the fallback
    from . import _sweep as _sweep_c
except ImportError:  # pragma: no cover - exercised only without a build
    _sweep_c = None

Rat = Fraction | int

_KERNEL = "compiled" if _sweep_c is not None else "python"

# dense grids beyond this many cells are refused rather than allocated
MAX_GRID_CELLS = 60_000_000


def kernel() -> str:
    """Name of the active sweep kernel, ``"compiled"`` or ``"python"``."""
    return _KERNEL


def compiled_available() -> bool:
    return _sweep_c is not None


def set_kernel(name: str) -> str:
    """Select the sweep kernel; returns the previous choice."""
    global _KERNEL
    if name not in ("compiled", "python"):
        raise ValueError(f"unknown kernel {name!r}")
    if name == "compiled" and _sweep_c is None:
        raise RuntimeError("compiled kernel is not built")
    old, _KERNEL = _KERNEL, name
    return old


def frac(x: Rat | str) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def lattice_of(values: Iterable[Rat], base: int = 1) -> int:
    """Smallest lattice denominator (a multiple of ``base``) holding all values."""
    d = base
    for v in values:
        d = lcm(d, frac(v).denominator)
    return d


def to_num(x: Rat, lattice: int) -> int:
    """Numerator of ``x`` over ``lattice``; raises InvalidLattice if off-lattice."""
    y = frac(x) * lattice
    if y.denominator != 1:
        raise InvalidLattice(f"exponent {x} is not on the 1/{lattice} lattice")
    return y.numerator


def _fmt_exp(e: Fraction) -> str:
    return str(e) if e.denominator == 1 else f"({e})"


class Region(enum.Enum):
    """Expansion direction for pure-g denominators.

    AT_ZERO expands ``(1 - g^w)^-1`` in increasing powers of g (for w > 0 a
    plain geometric series, for w < 0 after pulling out ``-g^{-w}``);
    AT_INFINITY is the mirror image under ``g -> 1/g``.
    """

    AT_ZERO = "at_zero"
    AT_INFINITY = "at_infinity"

    @property
    def other(self) -> "Region":
        return Region.AT_INFINITY if self is Region.AT_ZERO else Region.AT_ZERO


# ---------------------------------------------------------------------------
# characters


class Character:
    """Finite Laurent polynomial in g with integer coefficients."""

    __slots__ = ("lattice", "_terms")

    def __init__(self, terms: Mapping[Rat, int] | None = None, lattice: int | None = None):
        terms = dict(terms or {})
        d = lattice_of(terms, 2) if lattice is None else lattice
        acc: dict[int, int] = {}
        for e, c in terms.items():
            if c:
                n = to_num(e, d)
                acc[n] = acc.get(n, 0) + int(c)
        self.lattice = d
        self._terms = {n: c for n, c in acc.items() if c}

    @classmethod
    def from_numerators(cls, nums: Mapping[int, int], lattice: int) -> "Character":
        ch = cls(lattice=lattice)
        ch._terms = {int(n): int(c) for n, c in nums.items() if c}
        return ch

    @classmethod
    def monomial(cls, exp: Rat = 0, coeff: int = 1) -> "Character":
        return cls({frac(exp): coeff})

    @classmethod
    def one(cls) -> "Character":
        return cls({0: 1})

    @property
    def numerators(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self) -> list[tuple[Fraction, int]]:
        return [(Fraction(n, self.lattice), c) for n, c in sorted(self._terms.items())]

    def coeff(self, exp: Rat) -> int:
        y = frac(exp) * self.lattice
        if y.denominator != 1:
            return 0
        return self._terms.get(y.numerator, 0)

    def on_lattice(self, lattice: int) -> "Character":
        if lattice == self.lattice:
            return self
        return Character(dict(self.items()), lattice)

    def _pair(self, other: "Character") -> tuple["Character", "Character"]:
        d = lcm(self.lattice, other.lattice)
        return self.on_lattice(d), other.on_lattice(d)

    def __add__(self, other: "Character") -> "Character":
        a, b = self._pair(other)
        out = dict(a._terms)
        for n, c in b._terms.items():
            out[n] = out.get(n, 0) + c
        return Character.from_numerators(out, a.lattice)

    def __neg__(self) -> "Character":
        return Character.from_numerators({n: -c for n, c in self._terms.items()}, self.lattice)

    def __sub__(self, other: "Character") -> "Character":
        return self + (-other)

    def __mul__(self, other: "Character | int") -> "Character":
        if isinstance(other, int):
            return Character.from_numerators({n: c * other for n, c in self._terms.items()}, self.lattice)
        a, b = self._pair(other)
        out: dict[int, int] = {}
        for n1, c1 in a._terms.items():
            for n2, c2 in b._terms.items():
                out[n1 + n2] = out.get(n1 + n2, 0) + c1 * c2
        return Character.from_numerators(out, a.lattice)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Character({0: other}) if other else Character()
        if not isinstance(other, Character):
            return NotImplemented
        a, b = self._pair(other)
        return a._terms == b._terms

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def rank(self) -> int:
        """Value at g = 1."""
        return sum(self._terms.values())

    def mirror(self) -> "Character":
        return Character.from_numerators({-n: c for n, c in self._terms.items()}, self.lattice)

    def support(self) -> tuple[Fraction, Fraction] | None:
        if not self._terms:
            return None
        return Fraction(min(self._terms), self.lattice), Fraction(max(self._terms), self.lattice)

    def to_json(self) -> dict:
        return {"lattice": self.lattice,
                "terms": [[0, n, str(c)] for n, c in sorted(self._terms.items())]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Character":
        d = int(obj["lattice"])
        nums: dict[int, int] = {}
        for t in obj["terms"]:
            if int(t[0]) != 0:
                raise InvalidLattice("a character has no q-exponents")
            nums[int(t[1])] = nums.get(int(t[1]), 0) + int(t[2])
        return cls.from_numerators(nums, d)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mon = "" if e == 0 else ("g" if e == 1 else f"g^{_fmt_exp(e)}")
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


def char_mul(a: Character, b: Character) -> Character:
    return a * b


# ---------------------------------------------------------------------------
# bigraded series


class BigradedSeries:
    """Truncated series sum a_{m,h} q^m g^h with a certified window.

    Coefficients are exact for ``m <= q_max`` and ``|h| <= g_window``.
    ``q_floor`` bounds the q-support from below.  ``g_support``, when not
    None, is an interval outside which every coefficient with ``m <= q_max``
    is known to vanish.
    """

    __slots__ = ("lattice_q", "lattice_g", "q_max", "g_window", "q_floor", "g_support", "_terms")

    def __init__(self, terms: Mapping[tuple[Rat, Rat], int] | None = None, *, q_max: Rat,
                 g_window: Rat, q_floor: Rat | None = None,
                 g_support: tuple[Rat, Rat] | None = None,
                 lattice_q: int | None = None, lattice_g: int | None = None):
        terms = dict(terms or {})
        self.q_max = frac(q_max)
        self.g_window = frac(g_window)
        if self.g_window < 0:
            raise WindowExceeded("empty g-window")
        qs = [frac(k[0]) for k in terms]
        gs = [frac(k[1]) for k in terms]
        self.lattice_q = lattice_of(qs + [self.q_max], 1) if lattice_q is None else lattice_q
        self.lattice_g = lattice_of(gs + [self.g_window], 2) if lattice_g is None else lattice_g
        floor = min(qs, default=self.q_max) if q_floor is None else frac(q_floor)
        self.q_floor = min(floor, self.q_max)
        self.g_support = None if g_support is None else (frac(g_support[0]), frac(g_support[1]))
        acc: dict[tuple[int, int], int] = {}
        for (m, h), c in terms.items():
            if not c:
                continue
            m, h = frac(m), frac(h)
            if m > self.q_max or abs(h) > self.g_window:
                continue
            key = (to_num(m, self.lattice_q), to_num(h, self.lattice_g))
            acc[key] = acc.get(key, 0) + int(c)
        self._terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def _raw(cls, nums: dict[tuple[int, int], int], lq: int, lg: int, q_max: Fraction,
             g_window: Fraction, q_floor: Fraction,
             g_support: tuple[Fraction, Fraction] | None) -> "BigradedSeries":
        s = cls.__new__(cls)
        s.lattice_q, s.lattice_g = lq, lg
        s.q_max, s.g_window = q_max, g_window
        s.q_floor = min(q_floor, q_max)
        s.g_support = g_support
        qn, gn = q_max * lq, g_window * lg
        s._terms = {k: c for k, c in nums.items() if c and k[0] <= qn and abs(k[1]) <= gn}
        return s

    @classmethod
    def zero(cls, q_max: Rat, g_window: Rat) -> "BigradedSeries":
        return cls(q_max=q_max, g_window=g_window, q_floor=q_max, g_support=(0, 0))

    @classmethod
    def unit(cls, q_max: Rat, g_window: Rat) -> "BigradedSeries":
        return cls({(0, 0): 1}, q_max=q_max, g_window=g_window, q_floor=0, g_support=(0, 0))

    @classmethod
    def from_character(cls, ch: Character, q_max: Rat, g_window: Rat, q_exp: Rat = 0) -> "BigradedSeries":
        sup = ch.support() or (Fraction(0), Fraction(0))
        return cls({(q_exp, e): c for e, c in ch.items()}, q_max=q_max, g_window=g_window,
                   q_floor=q_exp, g_support=sup, lattice_g=lcm(ch.lattice, lattice_of([g_window], 2)))

    # -- access -------------------------------------------------------------

    @property
    def numerators(self) -> dict[tuple[int, int], int]:
        return dict(self._terms)

    def items(self) -> list[tuple[Fraction, Fraction, int]]:
        lq, lg = self.lattice_q, self.lattice_g
        return [(Fraction(m, lq), Fraction(h, lg), c) for (m, h), c in sorted(self._terms.items())]

    def __iter__(self) -> Iterator[tuple[Fraction, Fraction, int]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def in_window(self, m: Rat, h: Rat) -> bool:
        return frac(m) <= self.q_max and abs(frac(h)) <= self.g_window

    def extract(self, m: Rat, h: Rat) -> int:
        m, h = frac(m), frac(h)
        if not self.in_window(m, h):
            raise WindowExceeded(f"(m, h) = ({m}, {h}) outside q <= {self.q_max}, |h| <= {self.g_window}")
        ym, yh = m * self.lattice_q, h * self.lattice_g
        if ym.denominator != 1 or yh.denominator != 1:
            return 0
        return self._terms.get((ym.numerator, yh.numerator), 0)

    def extract_coefficient(self, m: Rat) -> Character:
        m = frac(m)
        if m > self.q_max:
            raise WindowExceeded(f"q-degree {m} beyond truncation {self.q_max}")
        ym = m * self.lattice_q
        if ym.denominator != 1:
            return Character(lattice=self.lattice_g)
        return Character.from_numerators({h: c for (x, h), c in self._terms.items() if x == ym.numerator},
                                         self.lattice_g)

    def q_degrees(self) -> list[Fraction]:
        return sorted({Fraction(x, self.lattice_q) for x, _ in self._terms})

    # -- lattices and windows ----------------------------------------------

    def on_lattice(self, lattice_q: int, lattice_g: int) -> "BigradedSeries":
        if (lattice_q, lattice_g) == (self.lattice_q, self.lattice_g):
            return self
        if lattice_q % self.lattice_q or lattice_g % self.lattice_g:
            for (x, h) in self._terms:
                to_num(Fraction(x, self.lattice_q), lattice_q)
                to_num(Fraction(h, self.lattice_g), lattice_g)
        to_num(self.q_max, lattice_q)
        to_num(self.g_window, lattice_g)
        fq, fg = Fraction(lattice_q, self.lattice_q), Fraction(lattice_g, self.lattice_g)
        nums = {(int(x * fq), int(h * fg)): c for (x, h), c in self._terms.items()}
        return BigradedSeries._raw(nums, lattice_q, lattice_g, self.q_max, self.g_window,
                                   self.q_floor, self.g_support)

    def _pair(self, other: "BigradedSeries") -> tuple["BigradedSeries", "BigradedSeries"]:
        lq = lcm(self.lattice_q, other.lattice_q)
        lg = lcm(self.lattice_g, other.lattice_g)
        return self.on_lattice(lq, lg), other.on_lattice(lq, lg)

    def restrict(self, q_max: Rat | None = None, g_window: Rat | None = None) -> "BigradedSeries":
        q = self.q_max if q_max is None else min(self.q_max, frac(q_max))
        g = self.g_window if g_window is None else min(self.g_window, frac(g_window))
        lq = lcm(self.lattice_q, frac(q).denominator)
        lg = lcm(self.lattice_g, frac(g).denominator)
        s = self.on_lattice(lq, lg)
        return BigradedSeries._raw(s._terms, lq, lg, q, g, s.q_floor, s.g_support)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "BigradedSeries") -> "BigradedSeries":
        a, b = self._pair(other)
        out = dict(a._terms)
        for k, c in b._terms.items():
            out[k] = out.get(k, 0) + c
        sup = None
        if a.g_support is not None and b.g_support is not None:
            sup = (min(a.g_support[0], b.g_support[0]), max(a.g_support[1], b.g_support[1]))
        return BigradedSeries._raw(out, a.lattice_q, a.lattice_g, min(a.q_max, b.q_max),
                                   min(a.g_window, b.g_window), min(a.q_floor, b.q_floor), sup)

    def __neg__(self) -> "BigradedSeries":
        return self.scalar(-1)

    def __sub__(self, other: "BigradedSeries") -> "BigradedSeries":
        return self + (-other)

    def scalar(self, k: int) -> "BigradedSeries":
        nums = {key: c * k for key, c in self._terms.items()} if k else {}
        return BigradedSeries._raw(nums, self.lattice_q, self.lattice_g, self.q_max, self.g_window,
                                   self.q_floor, self.g_support if k else (Fraction(0), Fraction(0)))

    def _inner_support(self) -> tuple[Fraction, Fraction] | None:
        # support interval if it is known and fully inside the window
        s = self.g_support
        if s is None or s[0] < -self.g_window or s[1] > self.g_window:
            return None
        return s

    def __mul__(self, other: "BigradedSeries | int") -> "BigradedSeries":
        if isinstance(other, int):
            return self.scalar(other)
        a, b = self._pair(other)
        q_max = min(a.q_max + b.q_floor, b.q_max + a.q_floor)
        sa, sb = a._inner_support(), b._inner_support()
        if sa is not None and sb is not None:
            window = min(a.g_window, b.g_window)
            sup = (sa[0] + sb[0], sa[1] + sb[1])
        elif sb is not None:
            window = min(a.g_window - sb[1], a.g_window + sb[0])
            sup = None
        elif sa is not None:
            window = min(b.g_window - sa[1], b.g_window + sa[0])
            sup = None
        else:
            raise WindowExceeded("product of two series with unbounded g-tails is not certifiable")
        if window < 0:
            raise WindowExceeded("product leaves no certified g-window")
        qn, gn = q_max * a.lattice_q, window * a.lattice_g
        out: dict[tuple[int, int], int] = {}
        bitems = list(b._terms.items())
        for (x1, h1), c1 in a._terms.items():
            for (x2, h2), c2 in bitems:
                x = x1 + x2
                if x > qn:
                    continue
                h = h1 + h2
                if abs(h) > gn:
                    continue
                out[(x, h)] = out.get((x, h), 0) + c1 * c2
        return BigradedSeries._raw(out, a.lattice_q, a.lattice_g, q_max, window,
                                   a.q_floor + b.q_floor, sup)

    __rmul__ = __mul__

    def mirror(self) -> "BigradedSeries":
        sup = None if self.g_support is None else (-self.g_support[1], -self.g_support[0])
        return BigradedSeries._raw({(x, -h): c for (x, h), c in self._terms.items()},
                                   self.lattice_q, self.lattice_g, self.q_max, self.g_window,
                                   self.q_floor, sup)

    def substitute(self, slope: Rat = 0, q_offset: Rat = 0, g_offset: Rat = 0,
                   sign: int = 1) -> "BigradedSeries":
        """Series of ``sign q^c g^d S(q, q^s g)`` with a re-certified window.

        A coefficient (m, h) moves to (m + s h + c, h + d).  The q-bound
        shrinks by the worst case of ``s h`` over the known g-range.
        """
        s, c, d = frac(slope), frac(q_offset), frac(g_offset)
        sup = self._inner_support()
        lo, hi = sup if sup is not None else (-self.g_window, self.g_window)
        drift = min(s * lo, s * hi)
        q_max = self.q_max + c + drift
        floor = self.q_floor + c + drift
        window = self.g_window - abs(d)
        if window < 0:
            raise WindowExceeded("shift moves the whole g-window out of range")
        items = [(m + s * h + c, h + d, sign * k) for m, h, k in self.items()]
        lq = lattice_of([t[0] for t in items] + [q_max, floor], 1)
        lg = lattice_of([t[1] for t in items] + [window], 2)
        nums = {(to_num(m, lq), to_num(h, lg)): k for m, h, k in items}
        new_sup = None if self.g_support is None else (self.g_support[0] + d, self.g_support[1] + d)
        return BigradedSeries._raw(nums, lq, lg, q_max, window, floor, new_sup)

    # -- comparison ---------------------------------------------------------

    def first_difference(self, other: "BigradedSeries") -> tuple[Fraction, Fraction, int, int] | None:
        """First (m, h, a, b) in canonical order where the two series differ
        inside their common window, or None."""
        a, b = self._pair(other)
        qn = min(a.q_max, b.q_max) * a.lattice_q
        gn = min(a.g_window, b.g_window) * a.lattice_g
        keys = sorted(k for k in set(a._terms) | set(b._terms) if k[0] <= qn and abs(k[1]) <= gn)
        for k in keys:
            x, y = a._terms.get(k, 0), b._terms.get(k, 0)
            if x != y:
                return Fraction(k[0], a.lattice_q), Fraction(k[1], a.lattice_g), x, y
        return None

    def agrees_with(self, other: "BigradedSeries") -> bool:
        return self.first_difference(other) is None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BigradedSeries):
            return NotImplemented
        return (self.q_max == other.q_max and self.g_window == other.g_window
                and self.agrees_with(other))

    __hash__ = None  # type: ignore[assignment]

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        d = lcm(self.lattice_q, self.lattice_g)
        fq, fg = d // self.lattice_q, d // self.lattice_g
        out = {"lattice": d,
               "terms": [[x * fq, h * fg, str(c)] for (x, h), c in sorted(self._terms.items())],
               "q_max": str(self.q_max), "g_window": str(self.g_window),
               "q_floor": str(self.q_floor)}
        if self.g_support is not None:
            out["g_support"] = [str(self.g_support[0]), str(self.g_support[1])]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "BigradedSeries":
        d = int(obj["lattice"])
        terms: dict[tuple[Fraction, Fraction], int] = {}
        for x, h, c in obj["terms"]:
            key = (Fraction(int(x), d), Fraction(int(h), d))
            terms[key] = terms.get(key, 0) + int(c)
        sup = obj.get("g_support")
        return cls(terms, q_max=Fraction(obj["q_max"]), g_window=Fraction(obj["g_window"]),
                   q_floor=Fraction(obj["q_floor"]) if "q_floor" in obj else None,
                   g_support=None if sup is None else (Fraction(sup[0]), Fraction(sup[1])))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        rows = []
        for m in self.q_degrees():
            rows.append(f"q^{_fmt_exp(m)}*({self.extract_coefficient(m)!r})")
        body = " + ".join(rows) if rows else "0"
        return f"{body} + O(q^>{self.q_max}; |h|<={self.g_window})"


# ---------------------------------------------------------------------------
# factor lists


@dataclass(frozen=True, order=True)
class Factor:
    """The binomial ``(1 - sign * q^a g^w) ** power``."""

    a: Fraction
    w: Fraction
    power: int
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", frac(self.a))
        object.__setattr__(self, "w", frac(self.w))
        if self.power == 0 or not isinstance(self.power, int):
            raise ValueError("factor power must be a nonzero integer")
        if self.sign not in (1, -1):
            raise ValueError("factor sign must be +1 or -1")
        if self.a == 0 and self.w == 0:
            raise SingularFactor("factor (1 - q^0 g^0) is singular")
        # integer form of (a, w, sign): hashing Fractions is slow
        a, w = self.a, self.w
        object.__setattr__(self, "_ikey", (a.numerator, a.denominator, w.numerator, w.denominator, self.sign))

    @property
    def key(self) -> tuple[Fraction, Fraction, int]:
        return (self.a, self.w, self.sign)

    def is_polynomial(self) -> bool:
        return self.power > 0

    def __repr__(self) -> str:
        op = "-" if self.sign == 1 else "+"
        mon = []
        if self.a:
            mon.append(f"q^{_fmt_exp(self.a)}")
        if self.w:
            mon.append(f"g^{_fmt_exp(self.w)}")
        return f"(1 {op} {' '.join(mon)})^{self.power}"


Prefactor = tuple[tuple[tuple[Fraction, Fraction], int], ...]


def _canon_prefactor(terms: Mapping[tuple[Rat, Rat], int]) -> Prefactor:
    acc: dict[tuple[Fraction, Fraction], int] = {}
    for (q, g), c in terms.items():
        key = (frac(q), frac(g))
        acc[key] = acc.get(key, 0) + int(c)
    return tuple(sorted((k, c) for k, c in acc.items() if c))


def _canon_factors(factors: Iterable[Factor]) -> tuple[Factor, ...]:
    acc: dict[tuple, int] = {}
    seen: dict[tuple, Factor] = {}
    for f in factors:
        k = f._ikey
        acc[k] = acc.get(k, 0) + f.power
        if k not in seen:
            seen[k] = f
    out = []
    for k, p in acc.items():
        if p:
            f = seen[k]
            out.append(f if f.power == p else Factor(f.a, f.w, p, f.sign))
    out.sort(key=lambda f: f.key)
    return tuple(out)


class FactorList:
    """Finite Laurent prefactor times a multiset of binomial factors."""

    __slots__ = ("prefactor", "factors")

    def __init__(self, prefactor: Mapping[tuple[Rat, Rat], int] | None = None,
                 factors: Iterable[Factor] = ()):
        self.prefactor: Prefactor = _canon_prefactor({(0, 0): 1} if prefactor is None else prefactor)
        self.factors: tuple[Factor, ...] = _canon_factors(factors)

    @classmethod
    def one(cls) -> "FactorList":
        return cls()

    @classmethod
    def monomial(cls, q: Rat = 0, g: Rat = 0, coeff: int = 1) -> "FactorList":
        return cls({(q, g): coeff})

    @classmethod
    def of(cls, *factors: Factor, q: Rat = 0, g: Rat = 0, coeff: int = 1) -> "FactorList":
        return cls({(q, g): coeff}, factors)

    @classmethod
    def from_character(cls, ch: Character, q: Rat = 0) -> "FactorList":
        return cls({(q, e): c for e, c in ch.items()})

    def is_zero(self) -> bool:
        return not self.prefactor

    def is_monomial(self) -> bool:
        return len(self.prefactor) == 1

    def __mul__(self, other: "FactorList | int") -> "FactorList":
        if isinstance(other, int):
            return FactorList({k: c * other for k, c in self.prefactor}, self.factors)
        pre: dict[tuple[Fraction, Fraction], int] = {}
        for (q1, g1), c1 in self.prefactor:
            for (q2, g2), c2 in other.prefactor:
                key = (q1 + q2, g1 + g2)
                pre[key] = pre.get(key, 0) + c1 * c2
        return FactorList(pre, self.factors + other.factors)

    __rmul__ = __mul__

    def __neg__(self) -> "FactorList":
        return self * -1

    def inverse(self) -> "FactorList":
        if not self.is_monomial() or abs(self.prefactor[0][1]) != 1:
            raise ValueError("only unit-monomial prefactors are invertible")
        (q, g), c = self.prefactor[0]
        return FactorList({(-q, -g): c}, [Factor(f.a, f.w, -f.power, f.sign) for f in self.factors])

    def substitute(self, slope: Rat = 0, q_offset: Rat = 0, g_offset: Rat = 0,
                   sign: int = 1) -> "FactorList":
        """Exact symbolic ``sign q^c g^d F(q, q^s g)``."""
        s, c, d = frac(slope), frac(q_offset), frac(g_offset)
        pre = {(q + s * g + c, g + d): sign * k for (q, g), k in self.prefactor}
        return FactorList(pre, [Factor(f.a + s * f.w, f.w, f.power, f.sign) for f in self.factors])

    def positive_degrees(self) -> "FactorList":
        """Equal list with every polynomial factor at q-degree >= 0.

        Uses ``(1 - s x)^k = (-s)^k x^k (1 - s x^{-1})^k``.
        """
        coeff, dq, dg, out, changed = 1, Fraction(0), Fraction(0), [], False
        for f in self.factors:
            if f.power > 0 and f.a < 0:
                changed = True
                coeff *= (-f.sign) ** f.power
                dq += f.a * f.power
                dg += f.w * f.power
                out.append(Factor(-f.a, -f.w, f.power, f.sign))
            else:
                out.append(f)
        if not changed:
            return self
        return FactorList({(q + dq, g + dg): c * coeff for (q, g), c in self.prefactor}, out)

    def mirror(self) -> "FactorList":
        return FactorList({(q, -g): c for (q, g), c in self.prefactor},
                          [Factor(f.a, -f.w, f.power, f.sign) for f in self.factors])

    def scaled_q(self, q_offset: Rat) -> "FactorList":
        return self.substitute(q_offset=q_offset)

    def lattices(self) -> tuple[int, int]:
        qs = [q for (q, _), _ in self.prefactor] + [f.a for f in self.factors]
        gs = [g for (_, g), _ in self.prefactor] + [f.w for f in self.factors]
        return lattice_of(qs, 1), lattice_of(gs, 2)

    def q_floor(self) -> Fraction:
        """Lower bound for the q-support of any rendering."""
        if not self.prefactor:
            return Fraction(0)
        lo = min(q for (q, _), _ in self.prefactor)
        for f in self.factors:
            if f.power > 0 and f.a < 0:
                lo += f.a * f.power
        return lo

    def pure_g_factors(self) -> tuple[Factor, ...]:
        return tuple(f for f in self.factors if f.a == 0 and f.power < 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactorList):
            return NotImplemented
        return self.prefactor == other.prefactor and self.factors == other.factors

    def __hash__(self) -> int:
        return hash((self.prefactor, self.factors))

    def __repr__(self) -> str:
        pre = " + ".join(f"{c}*q^{_fmt_exp(q)}*g^{_fmt_exp(g)}" for (q, g), c in self.prefactor) or "0"
        return f"[{pre}] * " + " * ".join(repr(f) for f in self.factors) if self.factors else f"[{pre}]"


# ---------------------------------------------------------------------------
# rendering


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def render(fl: FactorList, region: Region, q_max: Rat, g_window: Rat) -> BigradedSeries:
    """Expand ``fl`` in ``region``; exact for ``q <= q_max``, ``|h| <= g_window``.

    Factors with ``power < 0`` must have ``a >= 0``; those with ``a = 0`` are
    expanded in the direction selected by ``region``.
    """
    q_max, g_window = frac(q_max), frac(g_window)
    fl = fl.positive_degrees()
    if region is Region.AT_INFINITY:
        return _render_at_zero(fl.mirror(), q_max, g_window).mirror()
    return _render_at_zero(fl, q_max, g_window)


def expand_factor(f: Factor, region: Region, q_max: Rat, g_window: Rat) -> BigradedSeries:
    return render(FactorList.of(f), region, q_max, g_window)


@dataclass
class _Plan:
    pre: list
    polys: list
    qsers: list
    gsteps: list
    floor: Fraction
    neg_room: Fraction
    budget: Fraction
    rho: Fraction
    ylo: Fraction
    yup: Fraction
    down: Fraction


def _plan(fl: FactorList, Q: Fraction) -> _Plan | None:
    """Classify the factors and bound the support of the AtZero expansion
    through q-degree Q.  Returns None for the zero list."""
    if fl.is_zero():
        return None
    polys, qsers, gsteps = [], [], []
    coeff, gshift = 1, Fraction(0)
    for f in fl.factors:
        if f.power > 0:
            polys.append(f)
        elif f.a > 0:
            qsers.append(f)
        elif f.a == 0:
            k = -f.power
            if f.w > 0:
                gsteps.append((f.w, f.sign, k))
            else:
                # (1 - s g^w)^-k = (-s)^k g^{-wk} (1 - s g^{-w})^-k
                coeff *= (-f.sign) ** k
                gshift += -f.w * k
                gsteps.append((-f.w, f.sign, k))
        else:
            raise NotRenderable(f"factor {f!r} has a negative q-degree and a negative power")

    pre = [((q, g + gshift), c * coeff) for (q, g), c in fl.prefactor]
    neg_room = -sum((f.a * f.power for f in polys if f.a < 0), Fraction(0))
    floor = min(q for (q, _), _ in pre) - neg_room
    budget = max(Q - floor, Fraction(0))
    consuming = [f for f in polys if f.a > 0] + qsers
    rho = max((abs(f.w) / f.a for f in consuming), default=Fraction(0))

    ylo = min(g for (_, g), _ in pre)
    yup = max(g for (_, g), _ in pre)
    down = Fraction(0)
    for f in polys:
        if f.a <= 0:
            ylo += min(Fraction(0), f.w * f.power)
            yup += max(Fraction(0), f.w * f.power)
            down += max(Fraction(0), -f.w * f.power)
    for f in consuming:
        cap = int(budget // f.a)
        n = min(cap, f.power) if f.power > 0 else cap
        ylo += min(Fraction(0), f.w) * n
        yup += max(Fraction(0), f.w) * n
    return _Plan(pre, polys, qsers, gsteps, floor, neg_room, budget, rho, ylo, yup, down)


def g_range(fl: FactorList, region: Region, q_max: Rat) -> tuple[Fraction, Fraction | None] | None:
    """Bounds on the g-support of ``render(fl, region, q_max, G)`` for any G.

    The unbounded end (from pure-g denominators) is reported as None; the
    AtInfinity range is returned as (lower or None, upper) accordingly.
    """
    q_max = frac(q_max)
    if region is Region.AT_INFINITY:
        r = g_range(fl.mirror(), Region.AT_ZERO, q_max)
        if r is None:
            return None
        lo, hi = r
        return (None if hi is None else -hi), -lo
    plan = _plan(fl, q_max)
    if plan is None:
        return None
    return plan.ylo, (None if plan.gsteps else plan.yup)


def _render_at_zero(fl: FactorList, Q: Fraction, G: Fraction) -> BigradedSeries:
    lq, lg = fl.lattices()
    lq = lcm(lq, Q.denominator)
    lg = lcm(lg, G.denominator, 2)
    plan = _plan(fl, Q)
    if plan is None:
        return BigradedSeries._raw({}, lq, lg, Q, G, Q, (Fraction(0), Fraction(0)))
    pre, polys, qsers, gsteps = plan.pre, plan.polys, plan.qsers, plan.gsteps
    floor, neg_room, ylo, yup = plan.floor, plan.neg_room, plan.ylo, plan.yup
    if floor > Q:
        return BigradedSeries._raw({}, lq, lg, Q, G, floor, None if gsteps else (Fraction(0), Fraction(0)))
    yhi = min(G + plan.rho * plan.budget + plan.down, yup)
    if gsteps:
        yhi = max(yhi, G)
    if ylo > yhi:
        return BigradedSeries._raw({}, lq, lg, Q, G, floor, None if gsteps else (Fraction(0), Fraction(0)))

    x0 = to_num(floor, lq)
    y0 = (ylo * lg).__floor__()
    nx = to_num(Q, lq) + _ceil(neg_room * lq) - x0 + 1
    ny = _ceil(yhi * lg) - y0 + 1
    if nx * ny > MAX_GRID_CELLS:
        raise NotRenderable(f"expansion grid {nx}x{ny} exceeds the size limit")

    def run(mod, dtype):
        grid = np.zeros((nx, ny), dtype=dtype)
        for (q, g), c in pre:
            i, j = to_num(q, lq) - x0, to_num(g, lg) - y0
            if 0 <= i < nx and 0 <= j < ny:
                grid[i, j] += c
        order = sorted(polys, key=lambda f: (f.a >= 0, f.a > 0)) + qsers
        for f in order:
            mod.poly_sweep(grid, to_num(f.a, lq), to_num(f.w, lg), f.sign, f.power) if f.power > 0 else \
                mod.geom_sweep(grid, to_num(f.a, lq), to_num(f.w, lg), f.sign, -f.power)
        for w, s, k in gsteps:
            mod.geom_sweep(grid, 0, to_num(w, lg), s, k)
        return grid

    grid = None
    if _KERNEL == "compiled":
        try:
            grid = run(_sweep_c, np.int64)
        except OverflowError:
            grid = None
    if grid is None:
        grid = run(_sweep_py, object)

    xmax = to_num(Q, lq) - x0
    glo, ghi = to_num(-G, lg) - y0, to_num(G, lg) - y0
    sub = grid[: xmax + 1, max(glo, 0): max(ghi + 1, 0)]
    xs, ys = np.nonzero(sub)
    off = max(glo, 0)
    nums = {(int(i) + x0, int(j) + off + y0): int(sub[i, j]) for i, j in zip(xs, ys)}
    support = None
    if not gsteps and ylo >= -G and yup <= G:
        support = (ylo, yup)
    return BigradedSeries._raw(nums, lq, lg, Q, G, floor, support)
