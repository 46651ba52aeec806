import json

import pytest

from builders import fixture_json
from padchar.errors import ValidationError
from padchar.rootgal import identity, root_datum
from padchar.scenario import (
    SCHEMA,
    bundled,
    bundled_names,
    dumps,
    load_scenario,
    parse_w,
    scenario_from_json,
)

NAMED = {"a1_split", "a1_elliptic", "a2_rotation", "c2_pgsp4_even", "c2_pgsp4_odd"}


def test_bundled_fixtures_are_present_and_valid():
    names = set(bundled_names())
    assert NAMED <= names
    for name in names:
        assert bundled(name).validate() == [], name


@pytest.mark.parametrize("name", sorted(NAMED | {"a1_ramified", "c2_mixed_depth"}))
def test_round_trip_is_canonical(name):
    once = bundled(name).to_json()
    twice = scenario_from_json(json.loads(dumps(once))).to_json()
    assert once == twice
    assert once["schema"] == SCHEMA


def test_load_from_path(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(fixture_json("a1_split")))
    assert load_scenario(path).name == bundled("a1_split").name
    path.write_text("{not json")
    with pytest.raises(ValidationError, match="invalid JSON"):
        load_scenario(path)
    with pytest.raises(ValidationError, match="cannot read"):
        load_scenario(tmp_path / "missing.json")


def test_parse_w_forms():
    rd = root_datum("C2")
    assert parse_w("identity", rd) == identity(2)
    assert parse_w("neg", rd) == ((-1, 0), (0, -1))
    assert parse_w("reflection:1,0", rd) == rd.reflection_matrix((1, 0))
    assert parse_w([[1, 0], [0, 1]], rd) == identity(2)
    assert parse_w(None, rd) == identity(2)
    with pytest.raises(ValidationError):
        parse_w("reflection:3,3", rd)


def test_schema_and_sections_are_checked():
    obj = fixture_json("a1_split")
    obj["schema"] = "other"
    with pytest.raises(ValidationError, match="schema"):
        scenario_from_json(obj)
    obj = fixture_json("a1_split")
    del obj["residue_field"]
    with pytest.raises(ValidationError, match="residue_field"):
        scenario_from_json(obj)


def test_validation_collects_problems():
    obj = fixture_json("a1_elliptic")
    obj["gamma"]["values"]["1"] = {"depth": "0", "residue": 2}
    errs = scenario_from_json(obj).validate()
    assert errs and "norm 1" in errs[0]
    obj = fixture_json("c2_pgsp4_even")
    obj["points"]["z"] = {"coordinates": ["1/3", "0"]}
    errs = scenario_from_json(obj).validate()
    assert any("'z'" in e for e in errs)


def test_explicit_ranks_are_read():
    obj = fixture_json("a1_elliptic")
    obj["ranks"] = {"G": 1, "Gprime": 0, "H": 0, "Hprime": 0}
    ctx = scenario_from_json(obj).context()
    assert ctx.ranks == {"G": 1, "G'": 0, "H": 0, "H'": 0}
    obj["ranks"] = {"K": 1}
    with pytest.raises(ValidationError):
        scenario_from_json(obj)


def test_flags_default_from_the_galois_model():
    assert bundled("a1_ramified").flags["unramified_split"] is False
    obj = fixture_json("a1_split")
    obj.pop("flags", None)
    assert scenario_from_json(obj).flags == {"unramified_split": True, "maximally_split_levi": True}
