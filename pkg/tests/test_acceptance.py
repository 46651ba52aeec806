"""Acceptance suite: one test per criterion, reported as PASS/FAIL lines."""

import copy
import json
import time

import pytest

from oracles import gauss_sum_numeric, prime_powers, snap_fourth_root
from padchar.arith import field, fq_norm_one_sgn, fq_sgn, gauss_sum, parity_sign
from padchar.charform import eval_char, eval_twisted_char, stability_check
from padchar.disc import check_part_disc
from padchar.fuzz import (
    SYSTEMS,
    is_elliptic,
    random_context,
    random_gxf_instance,
    random_point,
    random_weyl_element,
    rng_for,
    synthetic_setting,
    translates,
)
from padchar.apartment import point_from_coordinates
from padchar.mp import index_product_const, index_product_cor, verify_gxf_card
from padchar.rootgal import weyl_transport
from padchar.scenario import bundled, bundled_names, fixtures_dir, parse_w, scenario_from_json
from padchar.signs import (
    assemble,
    check_stable_invariance,
    check_stable_sign_identity,
    eps_noram,
    stable_sign_sides,
    with_point,
)

SEED = 20240601


def _fixture_json(name):
    return json.loads((fixtures_dir() / f"{name}.json").read_text())


def _c2_context(r, point, a, b):
    """PGSp4 with gamma = (a, b) in f^1 x f^1 on (alpha, beta), as powers of the generator t."""
    obj = copy.deepcopy(_fixture_json("c2_pgsp4_even"))
    obj["depth_r"] = str(r)
    obj["point"] = point
    vals = {"1,0": a, "0,1": b, "1,1": a + b, "2,1": 2 * a + b}
    obj["gamma"]["values"] = {
        oid: ({"depth": "inf"} if n % 6 == 0 else {"depth": "0", "residue": {"norm_one_pow": n}})
        for oid, n in vals.items()
    }
    return scenario_from_json(obj)


@pytest.mark.criterion(1)
def test_criterion_1_pgsp4_must_twist_example():
    start = time.perf_counter()
    F = field(5, 2)
    t = F.norm_one_generator
    # sgn on f^1 evaluated at beta(rho^vee(t)) = t
    assert fq_norm_one_sgn(t) == -1
    # the character gamma -> eps_noram(G) over all of f^1 x f^1 (f^1 has order 6)
    for a in range(6):
        for b in range(6):
            sgn_beta = fq_norm_one_sgn(t**b)
            assert sgn_beta == parity_sign(b)
            seen = {
                (r, pt): eps_noram(_c2_context(r, pt, a, b).context(), "G")
                for r in (2, 3) for pt in ("x", "y")
            }
            assert seen[(2, "x")] == sgn_beta
            assert seen[(2, "y")] == 1
            assert seen[(3, "x")] == 1
            assert seen[(3, "y")] == sgn_beta
    # on the bundled fixtures the twist changes the induced character at x only
    sc = bundled("c2_pgsp4_even")
    ctx, table = sc.context(), sc.class_table()
    args = (ctx, table, sc.char_values(), sc.orbital_oracle())
    assert eval_twisted_char(*args) == -eval_char(*args)
    odd = bundled("c2_pgsp4_odd")
    args = (odd.context(), odd.class_table(), odd.char_values(), odd.orbital_oracle())
    assert eval_twisted_char(*args) == eval_char(*args)
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(2)
def test_criterion_2_stable_sign_identity():
    start = time.perf_counter()
    checked = 0
    for name in bundled_names():
        sc = bundled(name)
        if sc.flags["unramified_split"] and sc.flags["maximally_split_levi"]:
            assert check_stable_sign_identity(sc.context()), name
            checked += 1
    assert checked >= 5
    rng = rng_for(SEED)
    flips = 0
    for _ in range(150):
        ctx = random_context(rng, unramified=True)
        assert check_stable_sign_identity(ctx)
        flips += stable_sign_sides(ctx)[0] == -1
    # the identity is exercised on both signs
    assert flips > 0
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(3)
def test_criterion_3_stable_invariance_under_weyl_transport():
    rng = rng_for(SEED + 3)
    families = {name: bundled(name).context() for name in bundled_names()}
    for system in SYSTEMS:
        families[f"random-{system}-unram"] = None
        families[f"random-{system}-ram"] = None
    for fam, ctx0 in families.items():
        for _ in range(100):
            if ctx0 is None:
                system = fam.split("-")[1]
                ctx = random_context(rng, system, unramified=fam.endswith("unram"))
            else:
                ctx = ctx0
            w = random_weyl_element(rng, ctx.part.rd)
            tr = weyl_transport(ctx.part.rd, ctx.part.gm, w, source=ctx.part)
            assert check_stable_invariance(ctx, tr), fam


@pytest.mark.criterion(4)
def test_criterion_4_gxf_card():
    start = time.perf_counter()
    rng = rng_for(SEED + 4)
    for system in SYSTEMS:
        for _ in range(200):
            part, pt, f, g, tl = random_gxf_instance(rng, system)
            assert verify_gxf_card(part, pt, f, g, tl)
    assert time.perf_counter() - start < 30.0


@pytest.mark.criterion(5)
def test_criterion_5_index_products():
    for name in bundled_names():
        ctx = bundled(name).context()
        lhs, rhs = index_product_const(ctx)
        assert lhs == rhs
        lhs, rhs = index_product_cor(ctx)
        assert lhs == rhs
    rng = rng_for(SEED + 5)
    for i in range(120):
        ctx = random_context(rng, unramified=i % 2 == 0)
        assert index_product_const(ctx)[0] == index_product_const(ctx)[1]
        lhs, rhs = index_product_cor(ctx)
        assert lhs == rhs


@pytest.mark.criterion(6)
def test_criterion_6_part_disc():
    for name in bundled_names():
        assert check_part_disc(bundled(name).context().approximation)
    rng = rng_for(SEED + 6)
    for i in range(300):
        ctx = random_context(rng, unramified=i % 3 != 0)
        assert check_part_disc(ctx.approximation)


@pytest.mark.criterion(7)
def test_criterion_7_gauss_sums():
    start = time.perf_counter()
    qs = prime_powers(2000)
    assert len(qs) == 323
    for q, p, k in qs:
        assert str(gauss_sum(q)) == snap_fourth_root(gauss_sum_numeric(q, p, k), q), q
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(8)
def test_criterion_8_stability_harness():
    rng = rng_for(SEED + 8)
    fixtures = []
    for name in bundled_names():
        sc = bundled(name)
        ctx = sc.context()
        if sc.flags["unramified_split"] and not ctx.xstar.levi_ids:
            fixtures.append((name, ctx, sc.class_table(), sc.char_values(), sc.stable_oracle()))
    while len(fixtures) < len(bundled_names()) + 6:
        ctx = random_context(rng, "C2", unramified=True)
        if ctx.xstar.levi_ids:
            continue
        table, theta, so = synthetic_setting(rng, ctx, classes=rng.randrange(1, 4))
        fixtures.append(("random-C2", ctx, table, theta, so))
    flips = 0
    for name, ctx, table, theta, so in fixtures:
        base = table.classes[0].class_id
        for i in range(50):
            w = random_weyl_element(rng, ctx.part.rd)
            tr = weyl_transport(ctx.part.rd, ctx.part.gm, w, source=ctx.part)
            pt = random_point(rng, tr.target, f"z{i}")
            res = stability_check(ctx, table, theta, so, w, {base: pt.name}, {pt.name: pt.to_json()})
            assert res.equal, name
            flips += res.untwisted_ratio == -1
    assert flips > 0
    # anti-test: without the twist the PGSp4 sum changes sign between x and y
    sc = bundled("c2_pgsp4_even")
    pr = sc.partner_raw
    res = stability_check(sc.context(), sc.class_table(), sc.char_values(), sc.stable_oracle(),
                          parse_w(pr["twist"], sc.rd), pr.get("point_map"))
    assert res.equal
    assert res.untwisted_ratio == -1
    assert res.untwisted_lhs != res.untwisted_rhs


@pytest.mark.criterion(9)
def test_criterion_9_sign_calculus():
    for q, p, k in prime_powers(121):
        F = field(p, k)
        units = [x for x in F.elements() if not x.is_zero()]
        sg = {x: fq_sgn(x) for x in units}
        for x in units:
            for y in units:
                assert fq_sgn(x * y) == sg[x] * sg[y]
        E = field(p, 2 * k)
        t = E.norm_one_generator
        f1 = [t**i for i in range(q + 1)]
        ns = {x: fq_norm_one_sgn(x) for x in f1}
        assert sum(v == 1 for v in ns.values()) == (q + 1) // 2
        for x in f1:
            for y in f1:
                assert fq_norm_one_sgn(x * y) == ns[x] * ns[y]
    # for elliptic tori the signs do not depend on the chosen point
    rng = rng_for(SEED + 9)
    contexts = [(name, bundled(name).context()) for name in bundled_names()]
    for system in SYSTEMS:
        contexts.extend((f"random-{system}", ctx) for ctx in _elliptic_contexts(rng, system, 3))
    checked = 0
    for name, ctx in contexts:
        if not ctx.part.gm.is_unramified or not is_elliptic(ctx.part):
            continue
        ref = assemble(ctx).to_json()
        pts = translates(rng, ctx.part, ctx.point.coordinates, 4)
        assert len({ctx.point.coordinates, *pts}) >= 3
        for i, y in enumerate(pts):
            pt = point_from_coordinates(ctx.part, f"y{i}", y)
            assert assemble(with_point(ctx, pt)).to_json() == ref, name
        checked += 1
    assert checked >= 16


def _elliptic_contexts(rng, system, count):
    out = []
    while len(out) < count:
        ctx = random_context(rng, system, unramified=True)
        if is_elliptic(ctx.part):
            out.append(ctx)
    return out
