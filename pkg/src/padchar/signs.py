"""The sign and fourth-root-of-unity calculus attached to (x, r, gamma, X*).

Every sign is computed at four levels: G (all roots), G' (the Levi roots
Root'), H (the centralizer roots Root_H of the r-approximation) and H'
(Root_H meet Root'). Quotients G/G' and H/H' and the layered pi'-level
quantity (G/G') / (H/H') are then formed exactly as ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .apartment import ApartmentPoint, ord_x_contains, transport_point
from .arith import ONE, FourthRoot, fq_norm_one_sgn, fq_sgn, gauss_sum, parity_sign, rational
from .elements import (
    INF,
    Approximation,
    CovectorProfile,
    ElementProfile,
    centralizer_ids,
    orbit_field,
    transport_covector,
    transport_profile,
)
from .errors import MismatchError, ValidationError
from .rootgal import NONSYMMETRIC, SYMM_RAM, SYMM_UNRAM, OrbitPartition, split_rank

LEVELS = ("G", "G'", "H", "H'")


@dataclass(frozen=True)
class RamifiedExtra:
    rank_pm: int
    kottwitz_sign: int
    w_unit: object = None  # FqElem in the orbit's residue field; None means 1

    def to_json(self) -> dict:
        out = {"rank_pm": self.rank_pm, "kottwitz_sign": self.kottwitz_sign}
        if self.w_unit is not None:
            out["w_unit"] = self.w_unit.to_json()
        return out


@dataclass(frozen=True)
class SignContext:
    part: OrbitPartition
    point: ApartmentPoint
    r: Fraction
    gamma: ElementProfile
    xstar: CovectorProfile
    ramified_extras: dict = dc_field(default_factory=dict)  # orbit_id -> RamifiedExtra
    ranks: dict | None = None  # level -> split rank

    @property
    def q(self) -> int:
        return self.gamma.p ** self.gamma.k

    @property
    def approximation(self) -> Approximation:
        return Approximation(self.r, self.gamma)

    def level_ids(self) -> dict:
        everything = {o.orbit_id for o in self.part.orbits}
        levi = set(self.xstar.levi_ids)
        hids = centralizer_ids(self.approximation)
        return {"G": everything, "G'": levi, "H": hids, "H'": hids & levi}


def validate_context(ctx: SignContext) -> list:
    out = []
    if ctx.r <= 0:
        out.append("depth r must be positive")
    if ctx.xstar.r != ctx.r:
        out.append("covector depth does not match r")
    if ctx.gamma.part is not ctx.part or ctx.xstar.part is not ctx.part:
        out.append("profiles are attached to a different orbit partition")
    for o in ctx.part.orbits:
        if (ctx.r * o.e).denominator != 1:
            out.append(f"orbit {o.orbit_id}: r not in (1/{o.e})Z")
    needed = ramified_needed(ctx)
    for oid in sorted(needed):
        if oid not in ctx.ramified_extras:
            out.append(f"orbit {oid}: ramified extras (rank_pm, kottwitz_sign) are required")
    for oid, ex in ctx.ramified_extras.items():
        if oid not in ctx.part.by_id or ctx.part[oid].kind != SYMM_RAM:
            out.append(f"ramified extras given for orbit {oid}, which is not symmetric-ramified")
        if ex.rank_pm < 1:
            out.append(f"orbit {oid}: rank_pm must be positive")
        if ex.kottwitz_sign not in (1, -1):
            out.append(f"orbit {oid}: kottwitz_sign must be +1 or -1")
    if ctx.ranks is not None:
        for lev in LEVELS:
            if lev not in ctx.ranks or ctx.ranks[lev] < 0:
                out.append(f"rank of {lev} missing or negative")
        if all(lev in ctx.ranks for lev in LEVELS):
            if ctx.ranks["G'"] > ctx.ranks["G"] or ctx.ranks["H'"] > ctx.ranks["H"]:
                out.append("ranks must satisfy rk G' <= rk G and rk H' <= rk H")
    return out


def check_context(ctx: SignContext) -> SignContext:
    errs = validate_context(ctx)
    if errs:
        raise ValidationError("; ".join(errs))
    return ctx


# ---------------------------------------------------------------------------
# Root sets


def root_sets(ctx: SignContext) -> dict:
    """Orbit ids of Root_{x,r/2}, Root_{x,(r-ord_gamma)/2} and Root(pi', gamma)."""
    half_r = ctx.r / 2
    x_half = set()
    x_shift = set()
    for o in ctx.part.orbits:
        if ord_x_contains(ctx.point, o, half_r):
            x_half.add(o.orbit_id)
        d = ctx.gamma[o.orbit_id].d
        if d is not INF and ord_x_contains(ctx.point, o, (ctx.r - d) / 2):
            x_shift.add(o.orbit_id)
    return {
        "x_r_half": x_half,
        "x_shifted": x_shift,
        "pi_prime": x_shift - set(ctx.xstar.levi_ids),
    }


def ramified_needed(ctx: SignContext) -> set:
    rs = root_sets(ctx)["pi_prime"]
    return {oid for oid in rs if ctx.part[oid].kind == SYMM_RAM}


# ---------------------------------------------------------------------------
# Per-level signs


def tilde_e(ctx: SignContext, level: str) -> int:
    ids = ctx.level_ids()[level] & root_sets(ctx)["x_shifted"]
    return parity_sign(len(ids))


def unram_contributions(ctx: SignContext, level: str) -> dict:
    """sgn over the norm-one group, per symmetric-unramified orbit of Root_{x,r/2}."""
    ids = ctx.level_ids()[level] & root_sets(ctx)["x_r_half"]
    out = {}
    for oid in sorted(ids):
        o = ctx.part[oid]
        if o.kind != SYMM_UNRAM:
            continue
        v = ctx.gamma[oid]
        if v.d is INF or v.d > 0:
            out[oid] = 1
            continue
        out[oid] = fq_norm_one_sgn(v.rho)
    return out


def eps_unram(ctx: SignContext, level: str) -> int:
    s = 1
    for v in unram_contributions(ctx, level).values():
        s *= v
    return s


def nosymm_contributions(ctx: SignContext, level: str) -> dict:
    """sgn over F_alpha^x, one entry per +-Gamma-orbit of nonsymmetric roots."""
    ids = ctx.level_ids()[level] & root_sets(ctx)["x_r_half"]
    out = {}
    for pm in ctx.part.pm_orbits():
        oid = pm[0]
        if ctx.part[oid].kind != NONSYMMETRIC or oid not in ids:
            continue
        v = ctx.gamma[oid]
        out[oid] = 1 if (v.d is INF or v.d > 0) else fq_sgn(v.rho)
    return out


def eps_nosymm(ctx: SignContext, level: str) -> int:
    s = 1
    for v in nosymm_contributions(ctx, level).values():
        s *= v
    return s


def eps_noram(ctx: SignContext, level: str) -> int:
    return eps_nosymm(ctx, level) * eps_unram(ctx, level)


def _e_exponent(ctx: SignContext, oid: str) -> int:
    o = ctx.part[oid]
    d = ctx.gamma[oid].d
    x = o.e * (ctx.r - d)
    if x.denominator != 1:
        raise ValidationError(f"orbit {oid}: e_alpha (r - ord_gamma alpha) = {x} is not an integer")
    return int(x)


def e_over(ctx: SignContext, ids: set) -> int:
    """Product over Gamma-orbits in ids with alpha(gamma) != 1 of (-1)^(e (r - d))."""
    s = 1
    for oid in sorted(ids):
        if ctx.gamma[oid].d is INF:
            continue
        s *= parity_sign(_e_exponent(ctx, oid))
    return s


def e_quot(ctx: SignContext, upper: str = "G", lower: str = "G'") -> int:
    """e(upper/lower), one factor per Gamma-orbit of upper-roots outside lower."""
    lv = ctx.level_ids()
    return e_over(ctx, lv[upper] - lv[lower])


def e_quot_per_root(ctx: SignContext, upper: str = "G", lower: str = "G'") -> int:
    """The same product taken over individual roots; identically +1.

    Kept only to document why the orbit-wise form is the meaningful one.
    """
    lv = ctx.level_ids()
    s = 1
    for oid in lv[upper] - lv[lower]:
        if ctx.gamma[oid].d is INF:
            continue
        s *= parity_sign(_e_exponent(ctx, oid) * ctx.part[oid].n)
    return s


def t_residue(ctx: SignContext, oid: str):
    """Residue of t_alpha = (e/2) N(w_alpha) d alpha^vee(X*) (alpha(gamma) - 1)."""
    o = ctx.part[oid]
    F = orbit_field(ctx.part, oid, ctx.gamma.p, ctx.gamma.k)
    p = F.p
    if o.e % p == 0:
        raise ValidationError(f"orbit {oid}: p divides e_alpha, so e_alpha/2 is not a unit")
    half_e = F(o.e) / F(2)
    ex = ctx.ramified_extras.get(oid)
    w_unit = F.one if ex is None or ex.w_unit is None else ex.w_unit
    d_nu = ctx.xstar.values[oid]
    v = ctx.gamma[oid]
    if d_nu[0] is INF or v.lam is None:
        raise ValidationError(f"orbit {oid}: t_alpha needs alpha outside Root' and alpha(gamma) != 1")
    t = half_e * w_unit * d_nu[1] * v.lam
    if t.is_zero():
        raise ValidationError(f"orbit {oid}: t_alpha has zero residue")
    return t


def ram_factor(ctx: SignContext, oid: str) -> FourthRoot:
    o = ctx.part[oid]
    ex = ctx.ramified_extras.get(oid)
    if ex is None:
        raise ValidationError(f"orbit {oid}: missing ramified extras")
    g = gauss_sum(ctx.q)
    val = FourthRoot.sign(parity_sign(ex.rank_pm - 1)) * (-g) ** o.f
    return val * fq_sgn(t_residue(ctx, oid)) * ex.kottwitz_sign


def eps_ram_over(ctx: SignContext, ids: set) -> FourthRoot:
    val = ONE
    for oid in sorted(ids):
        if ctx.part[oid].kind == SYMM_RAM:
            val = val * ram_factor(ctx, oid)
    return val


def eps_ram(ctx: SignContext, upper: str = "G", lower: str = "G'") -> FourthRoot:
    """epsilon^ram(upper/lower) over symmetric-ramified orbits of Root(pi', gamma)."""
    lv = ctx.level_ids()
    ids = (lv[upper] - lv[lower]) & root_sets(ctx)["x_shifted"]
    return eps_ram_over(ctx, ids)


# ---------------------------------------------------------------------------
# Report


@dataclass
class SignReport:
    tilde_e: dict
    eps_unram: dict
    eps_nosymm: dict
    eps_noram: dict
    e_quot: dict
    eps_ram: dict
    tilde_e_quot: dict
    eps_unram_quot: dict
    eps_nosymm_quot: dict
    eps_noram_quot: dict
    composed: FourthRoot
    root_sets: dict
    unram_terms: dict
    nosymm_terms: dict
    w_units: dict

    def to_json(self) -> dict:
        def s(v):
            return str(v) if isinstance(v, FourthRoot) else ("+1" if v == 1 else "-1")

        def lvl(d):
            return {k: s(v) for k, v in d.items()}

        return {
            "tilde_e": lvl(self.tilde_e),
            "eps_unram": lvl(self.eps_unram),
            "eps_nosymm": lvl(self.eps_nosymm),
            "eps_noram": lvl(self.eps_noram),
            "e": lvl(self.e_quot),
            "eps_ram": lvl(self.eps_ram),
            "tilde_e_quot": lvl(self.tilde_e_quot),
            "eps_unram_quot": lvl(self.eps_unram_quot),
            "eps_nosymm_quot": lvl(self.eps_nosymm_quot),
            "eps_noram_quot": lvl(self.eps_noram_quot),
            "composed": str(self.composed),
            "root_sets": {k: sorted(v) for k, v in self.root_sets.items()},
            "unram_terms": {lev: lvl(t) for lev, t in self.unram_terms.items()},
            "nosymm_terms": {lev: lvl(t) for lev, t in self.nosymm_terms.items()},
            "w_units": self.w_units,
        }


def _quotients(per_level: dict) -> dict:
    g = per_level["G"] * per_level["G'"]
    h = per_level["H"] * per_level["H'"]
    return {"G/G'": g, "H/H'": h, "pi'": g * h}


def assemble(ctx: SignContext) -> SignReport:
    check_context(ctx)
    te = {lev: tilde_e(ctx, lev) for lev in LEVELS}
    eu = {lev: eps_unram(ctx, lev) for lev in LEVELS}
    en = {lev: eps_nosymm(ctx, lev) for lev in LEVELS}
    enr = {lev: eps_noram(ctx, lev) for lev in LEVELS}
    for lev in LEVELS:
        if enr[lev] != en[lev] * eu[lev]:
            raise MismatchError("eps_noram != eps_nosymm * eps_unram")
    e_g = e_quot(ctx, "G", "G'")
    e_h = e_quot(ctx, "H", "H'")
    ram_g = eps_ram(ctx, "G", "G'")
    ram_h = eps_ram(ctx, "H", "H'")
    ram_pi = ram_g / ram_h
    rs = root_sets(ctx)
    direct = eps_ram_over(ctx, rs["pi_prime"] - ctx.level_ids()["H"])
    if direct != ram_pi:
        raise MismatchError("eps_ram(pi') differs from its direct evaluation off Root_H")
    te_q = _quotients(te)
    enr_q = _quotients(enr)
    composed = ram_pi * enr_q["pi'"] * te_q["pi'"]
    return SignReport(
        tilde_e=te,
        eps_unram=eu,
        eps_nosymm=en,
        eps_noram=enr,
        e_quot={"G/G'": e_g, "H/H'": e_h, "pi'": e_g * e_h},
        eps_ram={"G/G'": ram_g, "H/H'": ram_h, "pi'": ram_pi},
        tilde_e_quot=te_q,
        eps_unram_quot=_quotients(eu),
        eps_nosymm_quot=_quotients(en),
        eps_noram_quot=enr_q,
        composed=composed,
        root_sets=rs,
        unram_terms={lev: unram_contributions(ctx, lev) for lev in LEVELS},
        nosymm_terms={lev: nosymm_contributions(ctx, lev) for lev in LEVELS},
        w_units={oid: (ex.w_unit.to_json() if ex.w_unit is not None else [1])
                 for oid, ex in ctx.ramified_extras.items()},
    )


# ---------------------------------------------------------------------------
# Cross-checks


def residual_subsystem(ctx: SignContext, ids: set) -> list:
    """Roots of the reductive quotient at x: those alpha in ids with 0 in ord_x(alpha)."""
    roots = []
    for oid in ids:
        o = ctx.part[oid]
        if ord_x_contains(ctx.point, o, 0):
            roots.extend(o.roots)
    return roots


def computed_ranks(ctx: SignContext) -> dict:
    """Split ranks of G, G', H, H' from the reductive quotients at x (unramified tori)."""
    if not ctx.part.gm.is_unramified:
        raise ValidationError("split ranks can only be computed for unramified tori")
    frob = ctx.part.gm.frobenius
    lv = ctx.level_ids()
    return {lev: split_rank(ctx.part.rd, frob, residual_subsystem(ctx, lv[lev])) for lev in LEVELS}


def stable_sign_sides(ctx: SignContext, ranks: dict | None = None) -> tuple:
    ranks = ranks or ctx.ranks or computed_ranks(ctx)
    lhs = _quotients({lev: tilde_e(ctx, lev) for lev in LEVELS})["pi'"]
    parity = ranks["G"] - ranks["G'"] + ranks["H"] - ranks["H'"]
    rhs = parity_sign(parity) * e_quot(ctx, "G", "G'") * e_quot(ctx, "H", "H'")
    return lhs, rhs


def check_stable_sign_identity(ctx: SignContext, ranks: dict | None = None) -> bool:
    """Orbit-count sign versus the rank-parity times e(pi', gamma)."""
    lhs, rhs = stable_sign_sides(ctx, ranks)
    return lhs == rhs


def transport_context(ctx: SignContext, transport, point: ApartmentPoint | None = None) -> SignContext:
    """The context for Int(g) gamma, with g modeled by the Weyl transport."""
    pt = point if point is not None else transport_point(ctx.point, transport)
    extras = {transport.orbit_map[k]: v for k, v in ctx.ramified_extras.items()}
    return SignContext(
        transport.target,
        pt,
        ctx.r,
        transport_profile(ctx.gamma, transport),
        transport_covector(ctx.xstar, transport),
        extras,
        ctx.ranks,
    )


def check_stable_invariance(ctx: SignContext, transport, point: ApartmentPoint | None = None) -> bool:
    """e and eps_ram agree before and after transport.

    ``point`` may be any point of the transported torus's building; its
    cosets on symmetric ramified orbits must match the transported ones.
    """
    moved = transport_context(ctx, transport, point)
    if point is not None:
        ref = transport_point(ctx.point, transport)
        for o in moved.part.orbits:
            if o.kind == SYMM_RAM and ref.coset(o.orbit_id) != point.coset(o.orbit_id):
                raise ValidationError(
                    f"orbit {o.orbit_id}: ramified symmetric cosets must agree at the new point"
                )
    before = (e_quot(ctx), eps_ram(ctx), e_quot(ctx, "H", "H'"), eps_ram(ctx, "H", "H'"))
    after = (e_quot(moved), eps_ram(moved), e_quot(moved, "H", "H'"), eps_ram(moved, "H", "H'"))
    return before == after


def with_point(ctx: SignContext, point: ApartmentPoint) -> SignContext:
    return SignContext(ctx.part, point, ctx.r, ctx.gamma, ctx.xstar, ctx.ramified_extras, ctx.ranks)


def make_extra(part: OrbitPartition, p: int, k: int, oid: str, spec: dict) -> RamifiedExtra:
    from .elements import parse_ff

    if "kottwitz_sign" not in spec:
        raise ValidationError(f"orbit {oid}: kottwitz_sign has no default and must be given")
    if "rank_pm" not in spec:
        raise ValidationError(f"orbit {oid}: rank_pm must be given")
    w = None
    if "w_unit" in spec:
        w = parse_ff(orbit_field(part, oid, p, k), spec["w_unit"])
        if w.is_zero():
            raise ValidationError(f"orbit {oid}: w_unit must be nonzero")
    return RamifiedExtra(int(spec["rank_pm"]), int(spec["kottwitz_sign"]), w)


def parse_rank_dict(obj) -> dict:
    m = {"G": "G", "Gprime": "G'", "G'": "G'", "H": "H", "Hprime": "H'", "H'": "H'"}
    out = {}
    for k, v in obj.items():
        if k not in m:
            raise ValidationError(f"unknown rank key {k!r}")
        out[m[k]] = int(rational(v))
    return out
