import pytest

from builders import fixture_json, make_scenario
from padchar.arith import Exact, parse_exact
from padchar.charform import (
    ClassRecord,
    ConjClassTable,
    OrbitalOracle,
    class_table_to_json,
    eval_char,
    eval_char_terms,
    eval_stable_sum,
    eval_twisted_char,
    stability_check,
    stable_cross_check,
    stable_oracle_from_plain,
)
from padchar.errors import ValidationError
from padchar.rootgal import identity
from padchar.scenario import bundled, parse_w, scenario_from_json

C = Exact.symbol("c")
ONE = parse_exact("1")


def _c2_two_class():
    """PGSp4 with one class based at x and one at y, equal oracle values."""
    obj = fixture_json("c2_pgsp4_even")
    obj["classes"] = [
        {"id": "x", "w": "identity", "point": "x", "h_stable": "T"},
        {"id": "y", "w": "identity", "point": "y", "h_stable": "T"},
    ]
    obj["oracles"] = {
        "orbital": [{"class": cid, "element": "gamma", "value": {"symbol": "c"}} for cid in "xy"],
        "stable": [{"class": "T", "element": "gamma", "value": {"symbol": "SO"}}],
    }
    obj["theta_values"] = {"x": "1", "y": "1"}
    return scenario_from_json(obj)


def _args(sc):
    return sc.context(), sc.class_table(), sc.char_values(), sc.orbital_oracle()


def test_no_class_contains_the_head():
    sc = bundled("a1_split")
    ctx = sc.context()
    table = ConjClassTable([ClassRecord("x", identity(1), contains_head=False)])
    assert eval_char(ctx, table, {}, OrbitalOracle({})).is_zero()
    assert eval_stable_sum(ctx, table, {}, OrbitalOracle({}, stable_mode=True)).is_zero()


def test_single_term_echoes_the_oracle():
    sc = make_scenario("A1", {"1": {"depth": "0", "residue": 2}}, 1,
                       classes=[{"id": "x"}],
                       oracles={"orbital": [{"class": "x", "element": "gamma",
                                             "value": {"symbol": "c"}}]},
                       theta={"x": "1"})
    assert eval_char(*_args(sc)) == C


def test_opposite_eps_unram_cancels():
    sc = _c2_two_class()
    terms = eval_char_terms(*_args(sc))
    assert [t.signs["eps_noram"] for t in terms] == ["-1", "+1"]
    assert [t.signs["tilde_e"] for t in terms] == ["+1", "+1"]
    assert eval_char(*_args(sc)).is_zero()


def test_a1_points_flip_tilde_e_with_eps_unram():
    # on PGL2 the two vertices change tilde-e together with eps_unram
    obj = fixture_json("a1_elliptic")
    obj["points"]["y"] = {"coordinates": ["1/2"]}
    obj["classes"] = [{"id": "x", "point": "x"}, {"id": "y", "point": "y"}]
    obj["oracles"]["orbital"] = [{"class": c, "element": "gamma", "value": {"symbol": "c"}}
                                 for c in "xy"]
    obj["theta_values"] = {"x": "1", "y": "1"}
    sc = scenario_from_json(obj)
    assert eval_char(*_args(sc)) == C + C


def test_twisted_matches_untwisted_when_eps_noram_trivial():
    sc = bundled("c2_pgsp4_odd")
    assert eval_twisted_char(*_args(sc)) == eval_char(*_args(sc))


def test_twisted_differs_by_the_sign_of_one_term():
    sc = _c2_two_class()
    assert eval_twisted_char(*_args(sc)) == C + C
    untwisted = eval_char_terms(*_args(sc))
    twisted = eval_char_terms(*_args(sc), twisted=True)
    assert twisted[0].value == -untwisted[0].value
    assert twisted[1].value == untwisted[1].value


def test_pgsp4_twisted_and_untwisted_differ_by_sgn_beta():
    sc = bundled("c2_pgsp4_even")
    assert eval_char(*_args(sc)) == -eval_twisted_char(*_args(sc))


def test_twisted_needs_toral_data():
    sc = make_scenario("A1", {"1": {"depth": "2", "lead": 1}}, 2, levi=["1"],
                       classes=[{"id": "x"}],
                       oracles={"orbital": [{"class": "x", "element": "gamma", "value": "1"}]},
                       theta={"x": "1"})
    with pytest.raises(ValidationError):
        eval_twisted_char(*_args(sc))


def test_missing_oracle_names_the_class():
    sc = bundled("a1_elliptic")
    with pytest.raises(ValidationError, match="'x'"):
        eval_char(sc.context(), sc.class_table(), sc.char_values(), OrbitalOracle({}))
    with pytest.raises(ValidationError, match="plain"):
        eval_char(sc.context(), sc.class_table(), sc.char_values(), sc.stable_oracle())


def test_stable_single_class():
    sc = bundled("a2_rotation")
    ctx = sc.context()
    table = sc.class_table()
    so = OrbitalOracle({(table.classes[0].key_h_stable(), "gamma"): C}, stable_mode=True)
    theta = {rec.class_id: ONE for rec in table.classes}
    assert eval_stable_sum(ctx, table, theta, so) == C


def test_stable_cross_check_on_two_classes():
    sc = _c2_two_class()
    ctx, table, theta, orb = _args(sc)
    lhs, rhs = stable_cross_check(ctx, table, theta, orb)
    assert lhs == rhs
    assert stable_oracle_from_plain(table, orb).get("T", "gamma") == C + C


def test_stable_sum_needs_unramified_toral_data():
    sc = bundled("a1_ramified")
    with pytest.raises(ValidationError, match="unramified"):
        eval_stable_sum(sc.context(), sc.class_table(), sc.char_values(),
                        OrbitalOracle({}, stable_mode=True))


def test_stability_identity_and_a1_neg():
    for name, twist in (("a1_elliptic", "identity"), ("a1_elliptic", "neg"),
                        ("a1_split", "neg"), ("c2_pgsp4_odd", "identity")):
        sc = bundled(name)
        res = stability_check(sc.context(), sc.class_table(), sc.char_values(),
                              sc.stable_oracle(), parse_w(twist, sc.rd))
        assert res.equal, (name, twist)


def test_pgsp4_partner_needs_the_twist():
    sc = bundled("c2_pgsp4_even")
    pr = sc.partner_raw
    res = stability_check(sc.context(), sc.class_table(), sc.char_values(), sc.stable_oracle(),
                          parse_w(pr["twist"], sc.rd), pr["point_map"])
    assert res.equal
    assert res.untwisted_ratio == -1
    assert res.to_json()["untwisted_discrepancy"] == "-1"


def test_class_table_round_trip():
    table = bundled("c2_pgsp4_even").class_table()
    rows = class_table_to_json(table)
    assert rows[0]["id"] == "x"
    assert rows[0]["h_stable"] == "T"


def test_class_table_validation():
    with pytest.raises(ValidationError):
        ConjClassTable([ClassRecord("a", ((-1,),))])
    with pytest.raises(ValidationError):
        ConjClassTable([ClassRecord("a", identity(1)), ClassRecord("a", identity(1))])
    with pytest.raises(ValidationError):
        ConjClassTable([ClassRecord("a", identity(1), h_stable="S"),
                        ClassRecord("b", identity(1), contains_head=False, h_stable="S")])
