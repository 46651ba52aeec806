"""Character-formula evaluators with orbital integrals and head values as oracles.

A class table lists the pairs (S, theta) that enter a sum. Each record is
obtained from the base pair (T, phi) by a lattice automorphism w (the
relabeling of roots along Int(g)) together with the point of S's building
at which signs are evaluated. Three groupings are carried:

* ``class_id``: one H-conjugacy class (a term of the rational formula);
* ``g_class``: the G-conjugacy class, i.e. the representation it belongs to;
* ``h_stable``: the H-stable class (a term of the stable sum).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .apartment import ApartmentPoint, make_point, transport_point
from .arith import Exact, as_exact, parity_sign
from .errors import MismatchError, ValidationError
from .rootgal import Mat, as_mat, identity, mat_inverse, mat_mul, weyl_transport
from .signs import SignContext, assemble, computed_ranks, e_quot, eps_ram, transport_context


@dataclass(frozen=True)
class ClassRecord:
    class_id: str
    w: Mat
    point: object = None  # point name, an ApartmentPoint, or None for the transported base point
    rational: bool = True
    contains_head: bool = True
    h_stable: str = ""
    g_class: str = ""

    def key_h_stable(self) -> str:
        return self.h_stable or self.class_id

    def key_g_class(self) -> str:
        return self.g_class or self.class_id


@dataclass
class ConjClassTable:
    classes: list
    point_specs: dict = dc_field(default_factory=dict)  # name -> raw JSON spec

    def __post_init__(self):
        ids = [c.class_id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise ValidationError("class ids must be unique")
        if not self.classes or self.classes[0].w != identity(len(self.classes[0].w)):
            raise ValidationError("the first class must be the base class with w = identity")
        for c in self.classes:
            if isinstance(c.point, str) and c.point not in self.point_specs:
                raise ValidationError(f"class {c.class_id}: unknown point {c.point!r}")
        # every H-stable class lives inside a single stable class of pairs,
        # so it cannot mix classes that do and do not contain the head
        groups = {}
        for c in self.classes:
            groups.setdefault(c.key_h_stable(), set()).add(c.contains_head)
        for key, flags in groups.items():
            if len(flags) > 1:
                raise ValidationError(f"H-stable class {key!r} mixes classes with and without the head")

    def by_id(self, cid: str) -> ClassRecord:
        for c in self.classes:
            if c.class_id == cid:
                return c
        raise ValidationError(f"unknown class {cid!r}")


@dataclass
class OrbitalOracle:
    """Values keyed by (class key, element id); stable_mode means SO-hat values."""

    entries: dict
    stable_mode: bool = False

    def get(self, key: str, element_id: str) -> Exact:
        try:
            return self.entries[(key, element_id)]
        except KeyError:
            kind = "stable orbital" if self.stable_mode else "orbital"
            raise ValidationError(
                f"missing {kind} integral for class {key!r}, element {element_id!r}"
            ) from None


def class_context(ctx: SignContext, table: ConjClassTable, rec: ClassRecord) -> SignContext:
    w = as_mat(rec.w)
    tr = weyl_transport(ctx.part.rd, ctx.part.gm, w, source=ctx.part)
    return transport_context(ctx, tr, _record_point(table, rec, tr.target))


def _record_point(table: ConjClassTable, rec: ClassRecord, part):
    if rec.point is None or isinstance(rec.point, ApartmentPoint):
        return rec.point
    return make_point(part, rec.point, table.point_specs[rec.point])


@dataclass
class Term:
    class_id: str
    contributes: bool
    signs: dict
    value: Exact

    def to_json(self) -> dict:
        return {
            "class": self.class_id,
            "contributes": self.contributes,
            "signs": self.signs,
            "value": as_exact(self.value).to_json(),
        }


def _terms(ctx, table, char_oracle, orbital, element_id, twisted):
    terms = []
    for rec in table.classes:
        if not rec.contains_head:
            terms.append(Term(rec.class_id, False, {}, Exact()))
            continue
        cctx = class_context(ctx, table, rec)
        rep = assemble(cctx)
        sign = rep.eps_ram["pi'"] * rep.tilde_e_quot["pi'"]
        if not twisted:
            sign = sign * rep.eps_noram_quot["pi'"]
        chi = _char_value(char_oracle, rec.class_id)
        o = orbital.get(rec.class_id, element_id)
        terms.append(Term(
            rec.class_id, True,
            {
                "eps_ram": str(rep.eps_ram["pi'"]),
                "eps_noram": _s(rep.eps_noram_quot["pi'"]),
                "tilde_e": _s(rep.tilde_e_quot["pi'"]),
                "used": str(sign),
            },
            (chi * o).scale(sign),
        ))
    return terms


def _s(v: int) -> str:
    return "+1" if v == 1 else "-1"


def _char_value(char_oracle: dict, cid: str) -> Exact:
    try:
        return as_exact(char_oracle[cid])
    except KeyError:
        raise ValidationError(f"missing character value for class {cid!r}") from None


def _check_oracle(orbital: OrbitalOracle, stable: bool) -> None:
    if orbital.stable_mode != stable:
        want = "stable" if stable else "plain"
        raise ValidationError(f"this evaluation needs a {want} orbital oracle")


def eval_char_terms(ctx, table, char_oracle, orbital, element_id="gamma", twisted=False):
    _check_oracle(orbital, False)
    return _terms(ctx, table, char_oracle, orbital, element_id, twisted)


def eval_char(ctx, table, char_oracle, orbital, element_id="gamma") -> Exact:
    """Sum over classes containing gamma_{<r} of eps_ram eps_noram Phi e~ O-hat."""
    total = Exact()
    for t in eval_char_terms(ctx, table, char_oracle, orbital, element_id):
        total = total + t.value
    return total


def eval_twisted_char(ctx, table, char_oracle, orbital, element_id="gamma") -> Exact:
    """The same sum without eps_noram, as for the twisted induction (toral case)."""
    if ctx.xstar.levi_ids:
        raise ValidationError("the twisted formula is implemented for toral data (Root' empty)")
    total = Exact()
    for t in eval_char_terms(ctx, table, char_oracle, orbital, element_id, twisted=True):
        total = total + t.value
    return total


def _require_stable_setting(ctx: SignContext) -> None:
    if ctx.xstar.levi_ids:
        raise ValidationError("stable sums need toral data (Root' empty)")
    if not ctx.part.gm.is_unramified:
        raise ValidationError("stable sums need a torus split over the unramified extension")


def stable_ranks(ctx: SignContext, ranks: dict | None) -> dict:
    return ranks or ctx.ranks or computed_ranks(ctx)


def eval_stable_terms(ctx, table, char_oracle, stable_oracle, ranks=None, element_id="gamma"):
    _require_stable_setting(ctx)
    _check_oracle(stable_oracle, True)
    rk = stable_ranks(ctx, ranks)
    out = {}
    for rec in table.classes:
        if not rec.contains_head:
            continue
        key = rec.key_h_stable()
        cctx = class_context(ctx, table, rec)
        factor = eps_ram(cctx) / eps_ram(cctx, "H", "H'")
        factor = factor * (e_quot(cctx) * e_quot(cctx, "H", "H'") * parity_sign(rk["H"]))
        chi = _char_value(char_oracle, rec.class_id)
        if key in out:
            if out[key][0] != factor or out[key][1] != chi:
                raise MismatchError(
                    f"H-stable class {key!r}: sign or character value is not constant"
                )
            continue
        out[key] = (factor, chi)
    terms = {}
    for key, (factor, chi) in out.items():
        so = stable_oracle.get(key, element_id)
        terms[key] = (factor, (chi * so).scale(factor))
    return terms


def eval_stable_sum(ctx, table, char_oracle, stable_oracle, ranks=None, element_id="gamma") -> Exact:
    """Sum over H-stable classes of eps_ram theta e (-1)^rk H SO-hat.

    Equals (-1)^rk G times the sum of the twisted formula over all classes
    when the stable oracle is the sum of the plain one over each H-stable class.
    """
    total = Exact()
    for _, value in eval_stable_terms(ctx, table, char_oracle, stable_oracle, ranks, element_id).values():
        total = total + value
    return total


def stable_oracle_from_plain(table: ConjClassTable, orbital: OrbitalOracle,
                             element_id: str = "gamma") -> OrbitalOracle:
    """SO-hat of each H-stable class as the sum of O-hat over its H-classes."""
    entries = {}
    for rec in table.classes:
        if not rec.contains_head:
            continue
        key = (rec.key_h_stable(), element_id)
        entries[key] = entries.get(key, Exact()) + orbital.get(rec.class_id, element_id)
    return OrbitalOracle(entries, stable_mode=True)


def stable_cross_check(ctx, table, char_oracle, orbital, ranks=None, element_id="gamma") -> tuple:
    """(stable sum, (-1)^rk G * sum of the twisted formula)."""
    rk = stable_ranks(ctx, ranks)
    so = stable_oracle_from_plain(table, orbital, element_id)
    lhs = eval_stable_sum(ctx, table, char_oracle, so, rk, element_id)
    rhs = eval_twisted_char(ctx, table, char_oracle, orbital, element_id).scale(parity_sign(rk["G"]))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Stability harness


@dataclass
class StabilityResult:
    equal: bool
    lhs: Exact
    rhs: Exact
    untwisted_lhs: Exact
    untwisted_rhs: Exact

    @property
    def untwisted_ratio(self):
        """rhs/lhs of the untwisted sums when both are +-1 multiples of each other."""
        if self.untwisted_lhs == self.untwisted_rhs:
            return 1
        if self.untwisted_lhs == -self.untwisted_rhs:
            return -1
        return None

    def to_json(self) -> dict:
        ratio = self.untwisted_ratio
        return {
            "equal": self.equal,
            "stable_sum": self.lhs.to_json(),
            "stable_sum_transported": self.rhs.to_json(),
            "untwisted": self.untwisted_lhs.to_json(),
            "untwisted_transported": self.untwisted_rhs.to_json(),
            "untwisted_discrepancy": None if ratio is None else ("+1" if ratio == 1 else "-1"),
        }


def transported_setting(ctx, table, w, point_map=None, point_specs=None):
    """The stably conjugate element Int(g) gamma with g modeled by w.

    Every class is re-based on the transported torus. ``point_map`` sends a
    class id to the name of the point of the new torus's building (given in
    ``point_specs``); classes not listed keep the transported point.
    """
    w = as_mat(w)
    tr = weyl_transport(ctx.part.rd, ctx.part.gm, w, source=ctx.part)
    specs = dict(table.point_specs)
    specs.update(point_specs or {})
    base_point = None
    point_map = point_map or {}
    base_name = point_map.get(table.classes[0].class_id)
    if base_name is not None:
        base_point = make_point(tr.target, base_name, specs[base_name])
    new_ctx = transport_context(ctx, tr, base_point)
    winv = mat_inverse(w)
    new_classes = []
    for rec in table.classes:
        # conjugating by w re-bases the class on the transported torus
        wc = mat_mul(mat_mul(w, as_mat(rec.w)), winv)
        pt = point_map.get(rec.class_id)
        if pt is None and rec.point is not None:
            old = class_context(ctx, table, rec)
            move = weyl_transport(ctx.part.rd, old.part.gm, w, source=old.part)
            pt = transport_point(old.point, move)
        new_classes.append(ClassRecord(
            rec.class_id, wc, pt, rec.rational, rec.contains_head, rec.h_stable, rec.g_class,
        ))
    if base_name is not None:
        new_classes[0] = ClassRecord(
            new_classes[0].class_id, new_classes[0].w, base_name, new_classes[0].rational,
            new_classes[0].contains_head, new_classes[0].h_stable, new_classes[0].g_class)
    return new_ctx, ConjClassTable(new_classes, specs)


def transfer_stable_oracle(ctx, new_ctx, table, new_table, stable_oracle, element_id="gamma"):
    """(-1)^rk J SO^J = (-1)^rk H SO^H, per H-stable class."""
    rk_h = computed_ranks(ctx)["H"]
    rk_j = computed_ranks(new_ctx)["H"]
    sign = parity_sign(rk_j - rk_h)
    entries = {k: v.scale(sign) for k, v in stable_oracle.entries.items()}
    return OrbitalOracle(entries, stable_mode=True)


def stability_check(ctx, table, char_oracle, stable_oracle, w, point_map=None,
                    point_specs=None, plain_oracle=None, element_id="gamma") -> StabilityResult:
    """Compare stable sums at gamma and at its stable conjugate.

    Also evaluates the untwisted per-class sums (eps_noram kept) on both
    sides so the effect of the twist can be reported.
    """
    _require_stable_setting(ctx)
    new_ctx, new_table = transported_setting(ctx, table, w, point_map, point_specs)
    new_oracle = transfer_stable_oracle(ctx, new_ctx, table, new_table, stable_oracle, element_id)
    lhs = eval_stable_sum(ctx, table, char_oracle, stable_oracle, None, element_id)
    rhs = eval_stable_sum(new_ctx, new_table, char_oracle, new_oracle, None, element_id)
    plain = plain_oracle or OrbitalOracle(
        {(rec.class_id, element_id): stable_oracle.get(rec.key_h_stable(), element_id)
         for rec in table.classes if rec.contains_head})
    u_lhs = eval_char(ctx, table, char_oracle, plain, element_id)
    sign = parity_sign(computed_ranks(new_ctx)["H"] - computed_ranks(ctx)["H"])
    plain_new = OrbitalOracle({k: v.scale(sign) for k, v in plain.entries.items()})
    u_rhs = eval_char(new_ctx, new_table, char_oracle, plain_new, element_id)
    return StabilityResult(lhs == rhs, lhs, rhs, u_lhs, u_rhs)


def class_table_from_json(obj: list, point_specs: dict, rank: int) -> ConjClassTable:
    classes = []
    for entry in obj:
        w = entry.get("w")
        classes.append(ClassRecord(
            str(entry["id"]),
            as_mat(w) if w is not None else identity(rank),
            entry.get("point"),
            bool(entry.get("rational", True)),
            bool(entry.get("contains_head", True)),
            str(entry.get("h_stable", "")),
            str(entry.get("g_class", "")),
        ))
    return ConjClassTable(classes, dict(point_specs))


def class_table_to_json(table: ConjClassTable) -> list:
    out = []
    for c in table.classes:
        entry = {"id": c.class_id, "w": [list(r) for r in c.w]}
        if c.point is not None:
            entry["point"] = c.point
        if not c.rational:
            entry["rational"] = False
        if not c.contains_head:
            entry["contains_head"] = False
        if c.h_stable:
            entry["h_stable"] = c.h_stable
        if c.g_class:
            entry["g_class"] = c.g_class
        out.append(entry)
    return out
