"""Fixed-point data: weights of the tangent and auxiliary bundles at isolated points."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .errors import InvalidDatum
from .ring import Character

COMPONENT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["name", "tangent_weights", "orientation_sign"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "tangent_weights": {"type": "array", "items": {"type": "integer", "not": {"const": 0}}},
        "orientation_sign": {"enum": [1, -1]},
        "v_weights": {"type": "array", "items": {"type": "integer", "not": {"const": 0}}},
        "v0_rank": {"type": "integer", "minimum": 0, "multipleOf": 2},
        "v_orientation_sign": {"enum": [1, -1]},
        "w_character": {
            "type": "object",
            "patternProperties": {r"^-?\d+(/\d+)?$": {"type": "integer"}},
            "additionalProperties": False,
        },
        "l_c": {"type": "integer"},
        "o_N": {"enum": [0, 1]},
        "o_V": {"enum": [0, 1]},
    },
}

MANIFOLD_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["name", "fiber_dim", "components"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "fiber_dim": {"type": "integer", "minimum": 0, "multipleOf": 2},
        "declared_e": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
        "components": {"type": "array", "items": COMPONENT_SCHEMA},
        "notes": {"type": "string"},
    },
}


def _signed_dims(weights: tuple[int, ...]) -> tuple[dict[int, int], int]:
    dims = Counter(abs(w) for w in weights)
    flips = sum(1 for w in weights if w < 0)
    return dict(sorted(dims.items())), flips


@dataclass(frozen=True)
class FixedComponentDatum:
    """Weight data at one isolated fixed point.

    Weights are stored as given (signed).  Negative weights are conjugated
    on access; each conjugated complex line flips the orientation sign.
    """

    name: str
    tangent_weights: tuple[int, ...]
    orientation_sign: int = 1
    v_weights: tuple[int, ...] = ()
    v0_rank: int = 0
    v_orientation_sign: int = 1
    w_character: Character = field(default_factory=Character.one)
    l_c: int | None = None
    o_N: int = 0
    o_V: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tangent_weights", tuple(int(w) for w in self.tangent_weights))
        object.__setattr__(self, "v_weights", tuple(int(w) for w in self.v_weights))
        if any(w == 0 for w in self.tangent_weights):
            raise InvalidDatum(f"component {self.name!r}: zero tangent weight (point is not isolated)",
                               "/tangent_weights")
        if any(w == 0 for w in self.v_weights):
            raise InvalidDatum(f"component {self.name!r}: weight-0 V lines belong in v0_rank", "/v_weights")
        if self.orientation_sign not in (1, -1) or self.v_orientation_sign not in (1, -1):
            raise InvalidDatum(f"component {self.name!r}: orientation signs must be +1 or -1",
                               "/orientation_sign")
        if self.v0_rank < 0 or self.v0_rank % 2:
            raise InvalidDatum(f"component {self.name!r}: v0_rank must be even and nonnegative", "/v0_rank")

    # normalized data

    @property
    def n_dims(self) -> dict[int, int]:
        """dim N_v for v > 0 after conjugating negative weights."""
        return _signed_dims(self.tangent_weights)[0]

    @property
    def v_dims(self) -> dict[int, int]:
        return _signed_dims(self.v_weights)[0]

    @property
    def sigma(self) -> int:
        """Orientation sign relative to the complex structure of the normalized N."""
        return self.orientation_sign * (-1) ** _signed_dims(self.tangent_weights)[1]

    @property
    def sigma_v(self) -> int:
        return self.v_orientation_sign * (-1) ** _signed_dims(self.v_weights)[1]

    @property
    def half_dim(self) -> int:
        return len(self.tangent_weights)

    @property
    def v_rank(self) -> int:
        """Real rank of V."""
        return self.v0_rank + 2 * len(self.v_weights)

    @property
    def p_prime(self) -> int:
        return self.v0_rank // 2

    @property
    def e_N(self) -> int:
        return sum(v * v * d for v, d in self.n_dims.items())

    @property
    def d_N(self) -> int:
        return sum(v * d for v, d in self.n_dims.items())

    @property
    def e_V(self) -> int:
        return sum(u * u * d for u, d in self.v_dims.items())

    @property
    def d_V(self) -> int:
        return sum(u * d for u, d in self.v_dims.items())

    @property
    def rank_N(self) -> int:
        return sum(self.n_dims.values())

    def with_tangent_as_v(self) -> "FixedComponentDatum":
        """Copy with V replaced by the tangent bundle (same weights and orientation)."""
        return replace(self, v_weights=self.tangent_weights, v0_rank=0,
                       v_orientation_sign=self.orientation_sign, o_V=self.o_N)

    # serialization

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "tangent_weights": list(self.tangent_weights),
                               "orientation_sign": self.orientation_sign}
        if self.v_weights:
            out["v_weights"] = list(self.v_weights)
        if self.v0_rank:
            out["v0_rank"] = self.v0_rank
        if self.v_orientation_sign != 1:
            out["v_orientation_sign"] = self.v_orientation_sign
        if self.w_character != Character.one():
            out["w_character"] = {str(e): c for e, c in self.w_character.items()}
        if self.l_c is not None:
            out["l_c"] = self.l_c
        if self.o_N:
            out["o_N"] = self.o_N
        if self.o_V:
            out["o_V"] = self.o_V
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "FixedComponentDatum":
        w = obj.get("w_character")
        ch = Character({Fraction(k): int(c) for k, c in w.items()}) if w is not None else Character.one()
        return cls(name=obj["name"], tangent_weights=tuple(obj["tangent_weights"]),
                   orientation_sign=obj["orientation_sign"], v_weights=tuple(obj.get("v_weights", ())),
                   v0_rank=obj.get("v0_rank", 0), v_orientation_sign=obj.get("v_orientation_sign", 1),
                   w_character=ch, l_c=obj.get("l_c"), o_N=obj.get("o_N", 0), o_V=obj.get("o_V", 0))


@dataclass(frozen=True)
class ManifoldDatum:
    name: str
    fiber_dim: int
    components: tuple[FixedComponentDatum, ...]
    declared_e: Fraction | None = None
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        for i, c in enumerate(self.components):
            if 2 * c.half_dim != self.fiber_dim:
                raise InvalidDatum(f"component {c.name!r} has {c.half_dim} tangent weights but the fiber "
                                   f"has real dimension {self.fiber_dim}", f"/components/{i}/tangent_weights")
        ranks = {c.v_rank for c in self.components}
        if len(ranks) > 1:
            i = next(i for i, c in enumerate(self.components) if c.v_rank != self.components[0].v_rank)
            raise InvalidDatum("V has different ranks at different fixed points", f"/components/{i}/v_weights")

    @property
    def weight_set(self) -> list[int]:
        """The set J of normal weights occurring at some fixed point."""
        return sorted({v for c in self.components for v in c.n_dims})

    def with_tangent_as_v(self) -> "ManifoldDatum":
        return replace(self, components=tuple(c.with_tangent_as_v() for c in self.components))

    def replace_components(self, comps) -> "ManifoldDatum":
        return replace(self, components=tuple(comps))

    def to_json(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "fiber_dim": self.fiber_dim}
        if self.declared_e is not None:
            out["declared_e"] = str(self.declared_e)
        out["components"] = [c.to_json() for c in self.components]
        if self.notes:
            out["notes"] = self.notes
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, obj: Any) -> "ManifoldDatum":
        validate_json(obj)
        comps = []
        for i, c in enumerate(obj["components"]):
            try:
                comps.append(FixedComponentDatum.from_json(c))
            except InvalidDatum as exc:
                sub = "" if exc.pointer == "/" else exc.pointer
                raise InvalidDatum(exc.message, f"/components/{i}{sub}") from None
        e = obj.get("declared_e")
        return cls(name=obj["name"], fiber_dim=obj["fiber_dim"], components=tuple(comps),
                   declared_e=Fraction(e) if e is not None else None, notes=obj.get("notes", ""))

    @classmethod
    def load(cls, path: str | Path) -> "ManifoldDatum":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidDatum(f"not valid JSON: {exc}") from None
        return cls.from_json(obj)


def validate_json(obj: Any) -> None:
    """Raise InvalidDatum with a JSON pointer for the first schema violation."""
    validator = jsonschema.Draft202012Validator(MANIFOLD_SCHEMA)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        pointer = "".join(f"/{p}" for p in err.absolute_path)
        raise InvalidDatum(err.message, pointer)
