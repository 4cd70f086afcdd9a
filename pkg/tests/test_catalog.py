import json
from fractions import Fraction

import pytest

from eqindex import catalog
from eqindex.datum import FixedComponentDatum, ManifoldDatum, validate_json
from eqindex.errors import InvalidDatum
from eqindex.localization import dual_expansion_check
from eqindex.ring import Character


@pytest.mark.parametrize("name", catalog.names())
def test_shipped_json_matches_generator(name):
    built = catalog.CATALOG[name].datum()
    assert catalog.load_json(name) == built.to_json()
    assert catalog.get(name) == built


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_admission(name):
    entry = catalog.CATALOG[name]
    v = dual_expansion_check(catalog.get(name), entry.admission_op, 3, 40)
    assert v.passed != entry.negative_control


def test_negative_controls():
    assert catalog.negative_controls() == ["S2-w1-corrupt"]


def test_unknown_entry():
    with pytest.raises(KeyError):
        catalog.get("nope")


def test_S4_emits_two_components():
    obj = catalog.load_json("S4-w11")
    assert len(obj["components"]) == 2
    assert all(c["tangent_weights"] == [1, 1] for c in obj["components"])


def test_roundtrip_with_optional_fields(tmp_path):
    c = FixedComponentDatum("a", (1, -2), -1, v_weights=(3,), v0_rank=2, v_orientation_sign=-1,
                            w_character=Character({Fraction(1, 2): 2, -1: 1}), l_c=1, o_N=1, o_V=0)
    m = ManifoldDatum("X", 4, (c,), declared_e=Fraction(3, 2), notes="test")
    path = tmp_path / "x.json"
    path.write_text(m.dumps())
    assert ManifoldDatum.load(path) == m


@pytest.mark.parametrize("obj,pointer", [
    ({"name": "x", "fiber_dim": 2}, "/"),
    ({"name": "x", "fiber_dim": 3, "components": []}, "/fiber_dim"),
    ({"name": "x", "fiber_dim": 2, "components": [{"name": "a", "tangent_weights": [0], "orientation_sign": 1}]},
     "/components/0/tangent_weights/0"),
    ({"name": "x", "fiber_dim": 2, "components": [{"name": "a", "tangent_weights": [1], "orientation_sign": 2}]},
     "/components/0/orientation_sign"),
    ({"name": "x", "fiber_dim": 2, "components": [{"name": "a", "tangent_weights": [1], "orientation_sign": 1,
                                                   "extra": 1}]}, "/components/0"),
])
def test_schema_errors_carry_pointers(obj, pointer):
    with pytest.raises(InvalidDatum) as exc:
        validate_json(obj)
    assert exc.value.pointer == pointer


def test_semantic_errors_carry_pointers():
    obj = {"name": "x", "fiber_dim": 4, "components": [
        {"name": "a", "tangent_weights": [1, 2], "orientation_sign": 1},
        {"name": "b", "tangent_weights": [1], "orientation_sign": 1}]}
    with pytest.raises(InvalidDatum) as exc:
        ManifoldDatum.from_json(obj)
    assert exc.value.pointer == "/components/1/tangent_weights"


def test_invalid_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InvalidDatum):
        ManifoldDatum.load(p)


def test_negative_weights_are_conjugated():
    c = FixedComponentDatum("a", (-1, 2, 2), 1)
    assert c.n_dims == {1: 1, 2: 2}
    assert c.sigma == -1


def test_write_all_reproduces_the_shipped_files(tmp_path):
    catalog.write_all(tmp_path)
    for name in catalog.names():
        assert json.loads((tmp_path / f"{name}.json").read_text()) == catalog.load_json(name)
