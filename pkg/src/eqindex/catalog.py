"""Built-in manifold data.

Every entry is produced by a generator; the JSON files shipped under
``data/catalog`` are the serialized generator output and are checked
against it by the test suite.
"""

from __future__ import annotations

import json
from importlib import resources
from itertools import product
from typing import Callable

from .datum import FixedComponentDatum, ManifoldDatum

__all__ = ["CatalogEntry", "CATALOG", "names", "get", "load_json", "sphere", "sphere_product",
           "projective_space", "negative_controls"]


class CatalogEntry:
    def __init__(self, name: str, build: Callable[[], ManifoldDatum], summary: str,
                 negative_control: bool = False, admission_op: str = "dirac"):
        self.name = name
        self.build = build
        self.summary = summary
        self.negative_control = negative_control
        self.admission_op = admission_op

    def datum(self) -> ManifoldDatum:
        return self.build()


def sphere(weights: tuple[int, ...], name: str | None = None) -> ManifoldDatum:
    """Rotation of S^{2l} in C^l + R: the two poles carry the same weights
    with opposite orientations."""
    name = name or f"S{2 * len(weights)}-w" + "".join(str(w) for w in weights)
    comps = (FixedComponentDatum("north", weights, 1), FixedComponentDatum("south", weights, -1))
    return ManifoldDatum(name, 2 * len(weights), comps)


def sphere_product(weights_a: tuple[int, ...], weights_b: tuple[int, ...], name: str) -> ManifoldDatum:
    comps = []
    for (pa, sa), (pb, sb) in product((("N", 1), ("S", -1)), repeat=2):
        comps.append(FixedComponentDatum(pa + pb, tuple(weights_a) + tuple(weights_b), sa * sb))
    return ManifoldDatum(name, 2 * (len(weights_a) + len(weights_b)), tuple(comps))


def projective_space(a: tuple[int, ...], name: str, v: str = "none", extra_v: tuple[int, ...] = (),
                     l_c: bool = False) -> ManifoldDatum:
    """CP^n with the action of weights ``a`` on homogeneous coordinates.

    At the i-th coordinate point the tangent weights are ``a_j - a_i``.
    ``v="tangent"`` takes V = TX, and ``extra_v`` adds trivial lines of the
    given weights to V.  ``l_c`` adds the anticanonical Spin^c datum.
    """
    comps = []
    for i, ai in enumerate(a):
        tw = tuple(aj - ai for j, aj in enumerate(a) if j != i)
        vw = (tw if v == "tangent" else ()) + tuple(extra_v)
        comps.append(FixedComponentDatum(f"p{i}", tw, 1, v_weights=vw, l_c=sum(tw) if l_c else None))
    return ManifoldDatum(name, 2 * (len(a) - 1), tuple(comps))


def _corrupt() -> ManifoldDatum:
    m = sphere((1,), "S2-w1-corrupt")
    south = FixedComponentDatum("south", (2,), -1)
    return m.replace_components((m.components[0], south))


def _s2_w() -> ManifoldDatum:
    from .ring import Character
    m = sphere((1,), "S2-w1-W")
    north = FixedComponentDatum("north", (1,), 1, w_character=Character({1: 1}))
    return m.replace_components((north, m.components[1]))


def _with_v(m: ManifoldDatum, name: str) -> ManifoldDatum:
    out = m.with_tangent_as_v()
    return ManifoldDatum(name, out.fiber_dim, out.components, out.declared_e, out.notes)


CATALOG: dict[str, CatalogEntry] = {e.name: e for e in [
    CatalogEntry("S2-w1", lambda: sphere((1,)), "2-sphere, rotation weight 1"),
    CatalogEntry("S2-w2", lambda: sphere((2,)), "2-sphere, rotation weight 2"),
    CatalogEntry("S4-w11", lambda: sphere((1, 1)), "4-sphere, weights (1, 1)"),
    CatalogEntry("S4-w12", lambda: sphere((1, 2)), "4-sphere, weights (1, 2)"),
    CatalogEntry("S6-w111", lambda: sphere((1, 1, 1)), "6-sphere, weights (1, 1, 1)"),
    CatalogEntry("S2xS2", lambda: sphere_product((1,), (1,), "S2xS2"), "product of two weight-1 spheres"),
    CatalogEntry("S2-w1-V", lambda: _with_v(sphere((1,)), "S2-w1-V"), "S2-w1 with V = TX"),
    CatalogEntry("S4-w12-V", lambda: _with_v(sphere((1, 2)), "S4-w12-V"), "S4-w12 with V = TX"),
    CatalogEntry("CP3", lambda: projective_space((0, 1, 2, 3), "CP3"), "CP^3, weights (0, 1, 2, 3)"),
    CatalogEntry("CP3-V", lambda: projective_space((0, 1, 2, 3), "CP3-V", "tangent"),
                 "CP^3 with V = TX (e = 0)"),
    CatalogEntry("CP3-V2", lambda: projective_space((0, 1, 2, 3), "CP3-V2", "tangent", (2,)),
                 "CP^3 with V = TX plus a trivial line of weight 2 (e = 2)"),
    CatalogEntry("CP2-spinc", lambda: projective_space((0, 1, 2), "CP2-spinc", l_c=True),
                 "CP^2 with the anticanonical Spin^c structure", admission_op="spinc-s"),
    CatalogEntry("S2-w1-W", _s2_w, "S2-w1 with W = g at the north pole", admission_op="dirac-W"),
    CatalogEntry("S2-w1-corrupt", _corrupt, "S2-w1 with the south weight changed to 2",
                 negative_control=True),
]}


def names() -> list[str]:
    return list(CATALOG)


def negative_controls() -> list[str]:
    return [n for n, e in CATALOG.items() if e.negative_control]


def get(name: str) -> ManifoldDatum:
    """Catalog entry by name, read from the shipped JSON."""
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}")
    return ManifoldDatum.from_json(load_json(name))


def load_json(name: str) -> dict:
    path = resources.files("eqindex") / "data" / "catalog" / f"{name}.json"
    return json.loads(path.read_text())


def write_all(directory) -> None:
    """Regenerate the shipped JSON files from the generators."""
    from pathlib import Path
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name, entry in CATALOG.items():
        (d / f"{name}.json").write_text(entry.datum().dumps())
