from dataclasses import replace
from fractions import Fraction

import pytest

from builders import make_context, make_scenario
from padchar.arith import I, ONE, FourthRoot, field, fq_sgn
from padchar.errors import ValidationError
from padchar.fuzz import random_context, random_weyl_element, rng_for
from padchar.rootgal import identity, weyl_transport
from padchar.scenario import bundled
from padchar.signs import (
    assemble,
    check_stable_invariance,
    check_stable_sign_identity,
    computed_ranks,
    e_quot,
    e_quot_per_root,
    eps_nosymm,
    eps_noram,
    eps_ram,
    eps_unram,
    root_sets,
    stable_sign_sides,
    t_residue,
    tilde_e,
    unram_contributions,
    validate_context,
)

ALL_C2 = {"1,0", "0,1", "1,1", "2,1"}
C2_POINTS = {"x": {"coordinates": ["0", "0"]}, "y": {"coordinates": ["1/2", "0"]}}


def _c2(r, point="x", levi=()):
    values = {
        "1,0": {"depth": "0", "residue": {"norm_one_pow": 1}},
        "0,1": {"depth": "0", "residue": {"norm_one_pow": 1}},
        "1,1": {"depth": "0", "residue": {"norm_one_pow": 2}},
        "2,1": {"depth": "0", "residue": {"norm_one_pow": 3}},
    }
    return make_context("C2", values, r, frobenius="neg", points=C2_POINTS, point=point,
                        levi=levi)


def _a1_ramified(lead=1, kottwitz=1, rank_pm=1):
    return make_context("A1", {"1": {"depth": "1/2", "lead": lead}}, "3/2", p=3,
                        inertia=["neg"], points={"x": {"cosets": {"1": "0"}}},
                        extras={"1": {"rank_pm": rank_pm, "kottwitz_sign": kottwitz}})


def test_root_sets_empty_when_half_r_misses():
    ctx = bundled("a1_split").context()
    assert root_sets(ctx) == {"x_r_half": set(), "x_shifted": set(), "pi_prime": set()}
    assert tilde_e(ctx, "G") == 1
    assert eps_unram(ctx, "G") == 1


def test_root_sets_pgsp4():
    assert root_sets(_c2(2, "x"))["x_r_half"] == ALL_C2
    assert root_sets(_c2(2, "y"))["x_r_half"] == {"0,1", "2,1"}
    assert root_sets(_c2(3, "y"))["x_r_half"] == {"1,0", "1,1"}
    assert root_sets(_c2(2, "x", levi=["0,1"]))["pi_prime"] == ALL_C2 - {"0,1"}


def test_tilde_e_examples():
    assert tilde_e(_c2(2), "G") == 1
    assert tilde_e(bundled("a1_elliptic").context(), "G") == -1
    assert tilde_e(_c2(2, levi=["0,1"]), "G'") == -1


def test_eps_unram_pgsp4_beta_contribution():
    ctx = _c2(2)
    terms = unram_contributions(ctx, "G")
    assert terms["0,1"] == -1
    assert terms == {"0,1": -1, "1,0": -1, "1,1": 1, "2,1": -1}
    assert eps_unram(ctx, "G") == -1


def test_eps_unram_minus_one_in_f9():
    ctx = make_context("A1", {"1": {"depth": "0", "residue": [2, 0]}}, 2, p=3, frobenius="neg")
    assert ctx.gamma["1"].rho == -field(3, 2).one
    assert eps_unram(ctx, "G") == 1


def test_eps_nosymm_trivial_when_all_roots_symmetric():
    assert eps_nosymm(_c2(2), "G") == 1


@pytest.mark.parametrize("power,expected", [(1, -1), (2, 1), (5, -1)])
def test_eps_nosymm_a2_rotation(power, expected):
    ctx = make_context("A2", {"1,1": {"depth": "0", "residue": {"gen_pow": power}}}, 2, p=7,
                       frobenius=[[0, -1], [1, -1]])
    F = field(7, 3)
    assert fq_sgn(F.primitive**power) == expected
    assert eps_nosymm(ctx, "G") == expected
    assert eps_noram(ctx, "G") == expected


def test_e_quot_examples():
    # all depths equal r contribute exponent 0
    full = make_context("A1", {"1": {"depth": "2", "lead": 1}}, 2)
    assert e_quot(full) == 1
    assert e_quot(make_context("A1", {"1": {"depth": "0", "residue": 2}}, 2)) == 1
    assert e_quot(make_context("A1", {"1": {"depth": "0", "residue": 2}}, 1)) == 1
    # four elliptic orbits with odd exponent; a Levi removes one of them
    assert e_quot(_c2(1)) == 1
    assert e_quot(_c2(1, levi=["0,1"])) == -1


def test_e_quot_per_root_is_trivial():
    rng = rng_for(3)
    for _ in range(50):
        ctx = random_context(rng, unramified=rng.random() < 0.5)
        assert e_quot_per_root(ctx) == 1
        assert e_quot_per_root(ctx, "H", "H'") == 1


def test_eps_ram_examples():
    assert eps_ram(_c2(2)) == ONE
    assert eps_ram(_a1_ramified()) == -I
    # lead 2 is a non-square in F_3, which flips the Legendre factor
    ctx = _a1_ramified(lead=2)
    assert fq_sgn(t_residue(ctx, "1")) == -1
    assert eps_ram(ctx) == I
    assert eps_ram(_a1_ramified(kottwitz=-1)) == I
    assert eps_ram(_a1_ramified(rank_pm=2)) == I


def test_eps_ram_requires_extras():
    sc = make_scenario("A1", {"1": {"depth": "1/2", "lead": 1}}, "3/2", p=3, inertia=["neg"],
                       points={"x": {"cosets": {"1": "0"}}})
    with pytest.raises(ValidationError, match="ramified extras"):
        sc.context()


def test_assemble_pgsp4_twisting_character():
    even = assemble(_c2(2))
    assert even.eps_noram_quot["pi'"] == -1
    assert even.composed == FourthRoot.sign(-1)
    odd = assemble(_c2(3))
    assert odd.eps_noram_quot["pi'"] == 1
    assert assemble(_c2(3, "y")).eps_noram_quot["pi'"] == -1
    assert assemble(_c2(2, "y")).eps_noram_quot["pi'"] == 1


def test_assemble_report_json_is_stable():
    rep = assemble(bundled("a1_ramified").context()).to_json()
    assert rep["eps_ram"]["G/G'"] == "-i"
    assert rep["composed"] == "+i"
    assert rep["root_sets"]["pi_prime"] == ["1"]


def test_stable_sign_identity_examples():
    # Root' = Root and Root_H = Root: every level coincides
    ctx = make_context("A1", {"1": {"depth": "2", "lead": 1}}, 2, levi=["1", "-1"])
    assert stable_sign_sides(ctx) == (1, 1)
    ctx = bundled("a1_elliptic").context()
    assert computed_ranks(ctx) == {"G": 1, "G'": 0, "H": 0, "H'": 0}
    assert stable_sign_sides(ctx) == (-1, -1)
    assert check_stable_sign_identity(_c2(2))
    assert check_stable_sign_identity(_c2(3, "y"))


def test_stable_invariance_identity_and_reflection():
    ctx = _c2(2)
    rd = ctx.part.rd
    assert check_stable_invariance(ctx, weyl_transport(rd, ctx.part.gm, identity(2), source=ctx.part))
    s_alpha = rd.reflection_matrix((1, 0))
    assert check_stable_invariance(ctx, weyl_transport(rd, ctx.part.gm, s_alpha, source=ctx.part))


def test_stable_invariance_randomized():
    rng = rng_for(17)
    for _ in range(100):
        ctx = random_context(rng, unramified=rng.random() < 0.5)
        w = random_weyl_element(rng, ctx.part.rd)
        tr = weyl_transport(ctx.part.rd, ctx.part.gm, w, source=ctx.part)
        assert check_stable_invariance(ctx, tr)


def test_pi_prime_level_depends_only_on_head():
    # replacing gamma by gamma_{<r} leaves every pi'-level quotient unchanged
    rng = rng_for(23)
    for _ in range(60):
        ctx = random_context(rng, unramified=True)
        head = replace(ctx, gamma=ctx.approximation.head)
        a, b = assemble(ctx), assemble(head)
        assert a.composed == b.composed
        assert a.eps_noram_quot["pi'"] == b.eps_noram_quot["pi'"]
        assert a.e_quot["pi'"] == b.e_quot["pi'"]


def test_invalid_context_reports_every_problem():
    ctx = _c2(2)
    bad = replace(ctx, r=Fraction(-1), ranks={"G": 0, "G'": 1, "H": 0, "H'": 0})
    errs = validate_context(bad)
    assert any("positive" in e for e in errs)
    assert any("rk G'" in e for e in errs)
