"""Moy-Prasad quotient cardinalities for functions on Gamma-orbits of roots.

Cardinalities are kept as exponent ledgers {base: exponent}; all bases are
powers of the residue characteristic, so two ledgers are compared through
their total exponent of p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .apartment import ApartmentPoint, count_coset_points, count_in_coset, ord_x_contains
from .arith import INFINITY, Depth, depth, depth_tilde, prime_power, rational
from .disc import disc_val_gamma, disc_val_xstar
from .elements import Approximation, centralizer_ids, head_profile
from .errors import MismatchError, ValidationError
from .rootgal import OrbitPartition


class Ledger:
    """A product of prime-power factors, stored as {base: exponent}."""

    def __init__(self, items=None):
        self.terms: dict = {}
        for base, exp in (items or {}).items():
            self.add(base, exp)

    def add(self, base: int, exp) -> "Ledger":
        exp = Fraction(exp)
        if exp:
            self.terms[base] = self.terms.get(base, Fraction(0)) + exp
            if not self.terms[base]:
                del self.terms[base]
        return self

    def __mul__(self, other: "Ledger") -> "Ledger":
        out = Ledger(self.terms)
        for b, e in other.terms.items():
            out.add(b, e)
        return out

    def inverse(self) -> "Ledger":
        return Ledger({b: -e for b, e in self.terms.items()})

    def __truediv__(self, other: "Ledger") -> "Ledger":
        return self * other.inverse()

    def p_exponent(self) -> Fraction:
        total = Fraction(0)
        p0 = None
        for b, e in self.terms.items():
            p, k = prime_power(b)
            if p0 is not None and p != p0:
                raise ValidationError("ledger mixes residue characteristics")
            p0 = p
            total += k * e
        return total

    def __eq__(self, other):
        if not isinstance(other, Ledger):
            return NotImplemented
        return self.p_exponent() == other.p_exponent()

    def __hash__(self):
        return hash(self.p_exponent())

    def value(self) -> Fraction:
        out = Fraction(1)
        for b, e in self.terms.items():
            if e.denominator != 1:
                raise ValidationError("ledger has a non-integral exponent")
            out *= Fraction(b) ** int(e)
        return out

    def to_json(self) -> dict:
        return {str(b): str(e) for b, e in sorted(self.terms.items())}

    def __repr__(self):
        return "Ledger(" + " * ".join(f"{b}^{e}" for b, e in sorted(self.terms.items())) + ")"


@dataclass(frozen=True)
class DepthFunction:
    """A Gamma-invariant function on roots plus the zero weight, valued in R~ u {inf}."""

    torus_value: Depth
    values: dict  # orbit_id -> Depth (INFINITY allowed)

    def __getitem__(self, oid: str) -> Depth:
        if oid == "0":
            return self.torus_value
        try:
            return self.values[oid]
        except KeyError:
            raise ValidationError(f"depth function has no value on orbit {oid}") from None

    def plus(self) -> "DepthFunction":
        return DepthFunction(self.torus_value.with_plus(),
                             {k: v.with_plus() for k, v in self.values.items()})


def constant_function(part: OrbitPartition, torus, roots) -> DepthFunction:
    t = depth(torus)
    d = depth(roots)
    return DepthFunction(t, {o.orbit_id: d for o in part.orbits})


@dataclass(frozen=True)
class TorusLattice:
    """Jump structure of the torus Lie algebra: lines (coset rep, e, q_line)."""

    lines: tuple

    @classmethod
    def default(cls, rank: int, q: int) -> "TorusLattice":
        return cls(tuple((Fraction(0), 1, q) for _ in range(rank)))

    def card(self, lo: Depth, hi: Depth) -> Ledger:
        out = Ledger()
        if lo.is_infinite and hi.is_infinite:
            return out
        for c, e, ql in self.lines:
            out.add(ql, count_in_coset(Fraction(c), e, lo, hi))
        return out


def card_quotient(part: OrbitPartition, pt: ApartmentPoint, f: DepthFunction,
                  g: DepthFunction, tl: TorusLattice, ids=None) -> Ledger:
    """Cardinality of g_{x,f} / g_{x,g}, orbit by orbit.

    ``ids`` restricts to a subset of orbits (the roots of a subgroup
    containing the torus).
    """
    if g.torus_value < f.torus_value:
        raise ValidationError("f <= g fails at the zero weight")
    out = tl.card(f.torus_value, g.torus_value)
    for o in part.orbits:
        if ids is not None and o.orbit_id not in ids:
            continue
        a, b = f[o.orbit_id], g[o.orbit_id]
        if b < a:
            raise ValidationError(f"f <= g fails on orbit {o.orbit_id}")
        if a.is_infinite:
            continue
        if b.is_infinite:
            raise ValidationError(f"g must be finite where f is finite (orbit {o.orbit_id})")
        if o.q_alpha is None:
            raise ValidationError("orbit partition was built without a residue field size")
        out.add(o.q_alpha, count_coset_points(pt, o, a, b))
    return out


def gxf_hypotheses(part: OrbitPartition, f: DepthFunction, g: DepthFunction) -> list:
    """Violated hypotheses of the cardinality lemma, each naming its clause."""
    out = []
    for h, name in ((f, "f"), (g, "g")):
        for o in part.orbits:
            if h[o.orbit_id].plus:
                out.append(f"{name} must be real valued (orbit {o.orbit_id})")
        if h.torus_value.plus:
            out.append(f"{name} must be real valued at the zero weight")
    if out:
        return out
    if g.torus_value < f.torus_value:
        out.append("f <= g fails at the zero weight")
    for o in part.orbits:
        oid, nid = o.orbit_id, o.neg_id
        if g[oid] < f[oid]:
            out.append(f"f <= g fails on orbit {oid}")
        for h, name in ((f, "f"), (g, "g")):
            if h[oid].is_infinite != h[nid].is_infinite:
                out.append(f"{name} finite on {oid} but not on its negative")
            elif not h[oid].is_infinite:
                s = h[oid].value + h[nid].value
                if (s * o.e).denominator != 1:
                    out.append(f"{name}(alpha) + {name}(-alpha) not in (1/{o.e})Z on orbit {oid}")
        if not f[oid].is_infinite and g[oid].is_infinite:
            out.append(f"g must be finite where f is finite (orbit {oid})")
    return out


def gxf_card_sides(part, pt, f, g, tl) -> tuple:
    """(coset-count side, closed-form side) of the cardinality lemma."""
    errs = gxf_hypotheses(part, f, g)
    if errs:
        raise ValidationError("; ".join(errs))
    lhs = card_quotient(part, pt, f, g, tl) * card_quotient(part, pt, f.plus(), g.plus(), tl)
    rhs = tl.card(f.torus_value, g.torus_value) * tl.card(
        f.torus_value.with_plus(), g.torus_value.with_plus())
    q = _base_q(part)
    exp = Fraction(0)
    for o in part.orbits:
        oid, nid = o.orbit_id, o.neg_id
        if f[oid].is_infinite:
            continue
        s = (g[oid].value + g[nid].value) - (f[oid].value + f[nid].value)
        exp += o.n * s
    rhs.add(q, exp)
    return lhs, rhs


def verify_gxf_card(part, pt, f, g, tl) -> bool:
    lhs, rhs = gxf_card_sides(part, pt, f, g, tl)
    return lhs == rhs


def _base_q(part: OrbitPartition) -> int:
    if part.q is None:
        raise ValidationError("orbit partition was built without a residue field size")
    return part.q


def tilde_function(part: OrbitPartition, f: DepthFunction) -> DepthFunction:
    """f~(alpha) = tilde(f(-alpha)) where finite, else inf; f~(0) = tilde(f(0))."""
    vals = {}
    for o in part.orbits:
        v = f[o.neg_id]
        vals[o.orbit_id] = INFINITY if v.is_infinite else depth_tilde(v)
    t = f.torus_value
    return DepthFunction(INFINITY if t.is_infinite else depth_tilde(t), vals)


def shift_function(f: DepthFunction, shifts: dict) -> DepthFunction:
    """(f + r)(alpha) = f(alpha) + r_alpha; the zero weight is untouched."""
    return DepthFunction(f.torus_value, {k: v.shift(shifts.get(k, 0)) for k, v in f.values.items()})


def shift_determinant(part: OrbitPartition, f: DepthFunction, shifts: dict) -> Fraction:
    """Valuation of the determinant of the shift: sum of r_alpha over roots with f finite."""
    total = Fraction(0)
    for o in part.orbits:
        if not f[o.orbit_id].is_infinite:
            total += o.n * rational(shifts.get(o.orbit_id, 0))
    return total


# ---------------------------------------------------------------------------
# Index products


def _f_h_functions(ctx, ids):
    ap = Approximation(ctx.r, head_profile(ctx.approximation))
    hids = centralizer_ids(ap)
    fh = {}
    for oid in ids:
        if oid in hids:
            fh[oid] = Depth(0, True)
        else:
            d = ap.gamma[oid].d
            fh[oid] = Depth((ctx.r - d) / 2)
    f_h = DepthFunction(Depth(0, True), fh)
    f_plus = f_h.plus()
    h = DepthFunction(Depth(0, True), {oid: Depth(ctx.r / 2) for oid in ids})
    h_plus = DepthFunction(Depth(0, True), {oid: Depth(ctx.r / 2, True) for oid in ids})
    return ap, hids, f_h, f_plus, h, h_plus


def _const_sides(ctx, tl: TorusLattice, ids: set) -> tuple:
    part = ctx.part
    ap, hids, f_h, f_plus, h, h_plus = _f_h_functions(ctx, ids)
    lhs = card_quotient(part, ctx.point, f_h, h, tl, ids) * card_quotient(
        part, ctx.point, f_plus, h_plus, tl, ids)
    q = _base_q(part)
    rhs = Ledger()
    for oid in ids & hids:
        o = part[oid]
        if ord_x_contains(ctx.point, o, 0):
            rhs.add(o.q_alpha, -1)
        rhs.add(q, o.n * ctx.r)
    rhs.add(q, disc_val_gamma(ap.gamma, ids=ids))
    return lhs, rhs


def index_product_const(ctx, tl: TorusLattice | None = None, ids=None) -> tuple:
    """Both sides of the index-product formula for the head gamma_{<r}; raises on mismatch.

    The left side counts cosets for the functions 0+ v (r - ord_gamma)/2 and
    its plus-shift against r/2 and (r/2)+; the right side is
    |t_{0:0+}| |h_{x,0:0+}|^-1 prod_{Root_H} q^r |D_G(gamma)|^-1.
    """
    tl = tl or TorusLattice.default(ctx.part.rd.rank, ctx.q)
    ids = set(ids) if ids is not None else {o.orbit_id for o in ctx.part.orbits}
    lhs, rhs = _const_sides(ctx, tl, ids)
    if lhs != rhs:
        raise MismatchError(f"index product mismatch: {lhs!r} vs {rhs!r}")
    return lhs, rhs


def index_product_cor(ctx, tl: TorusLattice | None = None) -> tuple:
    """The G over G' ratio of index products against its closed form."""
    tl = tl or TorusLattice.default(ctx.part.rd.rank, ctx.q)
    lv = ctx.level_ids()
    g_l, _ = index_product_const(ctx, tl, lv["G"])
    gp_l, _ = index_product_const(ctx, tl, lv["G'"])
    lhs = g_l / gp_l
    part = ctx.part
    q = _base_q(part)
    head = head_profile(ctx.approximation)
    rhs = Ledger()
    for oid in lv["H"] - lv["H'"]:
        o = part[oid]
        if ord_x_contains(ctx.point, o, 0):
            rhs.add(o.q_alpha, -1)
    rhs.add(q, -disc_val_xstar(ctx.xstar, ids=lv["H"] - lv["H'"]))
    rhs.add(q, disc_val_gamma(head) - disc_val_gamma(head, ids=lv["G'"]))
    if lhs != rhs:
        raise MismatchError(f"corollary index product mismatch: {lhs!r} vs {rhs!r}")
    return lhs, rhs


def parse_depth_function(part: OrbitPartition, obj: dict) -> DepthFunction:
    """JSON: {"torus": "0+", "values": {orbit_id: "1/2" | "inf"}, "default": ...}."""
    default = obj.get("default")
    vals = {}
    given = obj.get("values", {})
    for o in part.orbits:
        if o.orbit_id in given:
            vals[o.orbit_id] = depth(given[o.orbit_id])
        elif default is not None:
            vals[o.orbit_id] = depth(default)
        else:
            raise ValidationError(f"depth function missing orbit {o.orbit_id}")
    return DepthFunction(depth(obj.get("torus", "0")), vals)
