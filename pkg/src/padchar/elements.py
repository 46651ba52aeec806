"""Root-value profiles of torus elements and of generic covectors.

An element gamma is recorded, per Gamma-orbit of roots, by the depth
ord(alpha(gamma) - 1), the residue of alpha(gamma) and the leading residue of
alpha(gamma) - 1. Data are stored for the orbit representative; residues live
in the residue field of F_alpha, i.e. F_{q^f} for the orbit's f.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .arith import INFINITY, Depth, FqElem, field, fmt_rational, rational
from .errors import ValidationError
from .rootgal import OrbitPartition, rank_q

INF = None  # depth value meaning alpha(gamma) = 1, or d alpha^vee(X*) = 0


def orbit_field(part: OrbitPartition, oid: str, p: int, k: int):
    return field(p, k * part[oid].f)


def parse_ff(F, obj) -> FqElem:
    """Coefficient list (low degree first), an int, or a power of a chosen generator."""
    if isinstance(obj, dict):
        if "gen_pow" in obj:
            return F.primitive ** int(obj["gen_pow"])
        if "norm_one_pow" in obj:
            return F.norm_one_generator ** int(obj["norm_one_pow"])
        raise ValidationError(f"bad field element {obj!r}")
    if isinstance(obj, bool):
        raise ValidationError(f"bad field element {obj!r}")
    if isinstance(obj, int):
        return F(obj)
    if isinstance(obj, (list, tuple)):
        return F(list(obj))
    raise ValidationError(f"bad field element {obj!r}")


def parse_depth_value(obj):
    if isinstance(obj, str) and obj.strip() in ("inf", "+inf", "infinity"):
        return INF
    return rational(obj)


def fmt_depth_value(d) -> str:
    return "inf" if d is INF else fmt_rational(d)


def as_depth(d) -> Depth:
    return INFINITY if d is INF else Depth(d)


@dataclass(frozen=True)
class RootValue:
    d: Fraction | None
    rho: FqElem
    lam: FqElem | None

    def to_json(self) -> dict:
        out = {"depth": fmt_depth_value(self.d), "residue": self.rho.to_json()}
        if self.lam is not None:
            out["lead"] = self.lam.to_json()
        return out


def negate_value(v: RootValue) -> RootValue:
    """Data of (-alpha)(gamma) = alpha(gamma)^-1 from that of alpha(gamma)."""
    if v.d is INF:
        return v
    rho_inv = v.rho.inverse()
    if v.d == 0:
        return RootValue(v.d, rho_inv, -v.lam * rho_inv)
    return RootValue(v.d, rho_inv, -v.lam)


@dataclass(frozen=True)
class ElementProfile:
    part: OrbitPartition
    p: int
    k: int
    values: dict  # orbit_id -> RootValue
    bounded: bool = True

    def __getitem__(self, oid: str) -> RootValue:
        try:
            return self.values[oid]
        except KeyError:
            raise ValidationError(f"profile has no data for orbit {oid}") from None

    def depth(self, oid: str) -> Depth:
        return as_depth(self[oid].d)

    def to_json(self) -> dict:
        reps = _representatives_to_store(self.part)
        return {
            "bounded": self.bounded,
            "values": {oid: self.values[oid].to_json() for oid in reps},
        }


def _representatives_to_store(part: OrbitPartition) -> list:
    return [ids[0] for ids in part.pm_orbits()]


def make_profile(part: OrbitPartition, p: int, k: int, data: dict,
                 bounded: bool = True) -> ElementProfile:
    """Build from ``{orbit_id: {"depth", "residue"?, "lead"?}}``; negatives are derived."""
    values = {}
    for oid, entry in data.items():
        o = part[oid]
        F = orbit_field(part, oid, p, k)
        d = parse_depth_value(entry.get("depth", "0"))
        if d is INF:
            rho, lam = F.one, None
            if "residue" in entry and parse_ff(F, entry["residue"]) != F.one:
                raise ValidationError(f"orbit {oid}: alpha(gamma) = 1 needs residue 1")
        elif d == 0:
            if "lead" in entry:
                lam = parse_ff(F, entry["lead"])
                rho = parse_ff(F, entry["residue"]) if "residue" in entry else F.one + lam
            elif "residue" in entry:
                rho = parse_ff(F, entry["residue"])
                lam = rho - F.one
            else:
                raise ValidationError(f"orbit {oid}: depth 0 needs a residue or a lead")
        else:
            if "lead" not in entry:
                raise ValidationError(f"orbit {oid}: positive depth needs a lead")
            lam = parse_ff(F, entry["lead"])
            rho = parse_ff(F, entry["residue"]) if "residue" in entry else F.one
        values[o.orbit_id] = RootValue(d, rho, lam)
    for o in part.orbits:
        if o.orbit_id not in values:
            if o.neg_id in values and o.neg_id != o.orbit_id:
                values[o.orbit_id] = negate_value(values[o.neg_id])
            else:
                raise ValidationError(f"profile has no data for orbit {o.orbit_id}")
    prof = ElementProfile(part, p, k, values, bounded)
    errs = validate(prof)
    if errs:
        raise ValidationError("; ".join(errs))
    return prof


def validate(profile: ElementProfile) -> list:
    """All violated invariants, each naming its orbit; empty when consistent."""
    out = []
    part = profile.part
    for o in part.orbits:
        oid = o.orbit_id
        v = profile.values.get(oid)
        if v is None:
            out.append(f"orbit {oid}: missing data")
            continue
        F = orbit_field(part, oid, profile.p, profile.k)
        if v.rho.field is not F or (v.lam is not None and v.lam.field is not F):
            out.append(f"orbit {oid}: residues must lie in F_{F.q}")
            continue
        if v.d is INF:
            if v.rho != F.one or v.lam is not None:
                out.append(f"orbit {oid}: alpha(gamma) = 1 needs residue 1 and no lead")
            continue
        if (v.d * o.e).denominator != 1:
            out.append(f"orbit {oid}: depth {fmt_rational(v.d)} not in (1/{o.e})Z")
        if profile.bounded and v.d < 0:
            out.append(f"orbit {oid}: bounded element with negative depth")
        if v.lam is None or v.lam.is_zero():
            out.append(f"orbit {oid}: lead must be a nonzero residue")
            continue
        if v.d == 0:
            if v.rho != F.one + v.lam:
                out.append(f"orbit {oid}: depth 0 requires residue = 1 + lead")
            if v.rho.is_zero():
                out.append(f"orbit {oid}: residue must be a unit")
        elif v.d > 0 and v.rho != F.one:
            out.append(f"orbit {oid}: positive depth requires residue 1")
        if o.kind == "symmetric-unramified" and v.d >= 0:
            half = profile.p ** (profile.k * o.f // 2)
            if v.rho ** (half + 1) != F.one:
                out.append(f"orbit {oid}: residue must have norm 1")
            elif v.d > 0 and v.lam ** half != -v.lam:
                out.append(f"orbit {oid}: lead must satisfy lambda^(q^(f/2)) = -lambda")
        if o.kind == "symmetric-ramified" and v.d >= 0:
            if v.d == 0 and v.rho != -F.one:
                out.append(f"orbit {oid}: ramified symmetric root at depth 0 needs residue -1")
            if v.d > 0 and (v.d * o.e) % 2 != 1:
                out.append(f"orbit {oid}: ramified symmetric root needs e*depth odd")
        if o.neg_id != oid:
            w = profile.values.get(o.neg_id)
            if w is not None and w != negate_value(v):
                out.append(f"orbit {oid}: data of the negative orbit {o.neg_id} is inconsistent")
    return out


def inverse_profile(profile: ElementProfile) -> ElementProfile:
    return replace(profile, values={k: negate_value(v) for k, v in profile.values.items()})


def multiply_depth_zero(a: ElementProfile, b: ElementProfile) -> ElementProfile:
    """Product of two profiles whose finite depths are all 0 (residues multiply)."""
    values = {}
    for oid, va in a.values.items():
        vb = b[oid]
        if va.d is INF:
            values[oid] = vb
            continue
        if vb.d is INF:
            values[oid] = va
            continue
        if va.d != 0 or vb.d != 0:
            raise ValidationError("multiply_depth_zero needs depth-0 data")
        rho = va.rho * vb.rho
        if rho == rho.field.one:
            raise ValidationError(f"orbit {oid}: product has positive depth")
        values[oid] = RootValue(Fraction(0), rho, rho - rho.field.one)
    return replace(a, values=values)


# ---------------------------------------------------------------------------
# Generic covectors


@dataclass(frozen=True)
class CovectorProfile:
    part: OrbitPartition
    p: int
    k: int
    r: Fraction
    values: dict  # orbit_id -> (depth or INF, nu or None)

    @property
    def levi_roots(self) -> set:
        return self.part.roots_in(self.levi_ids)

    @property
    def levi_ids(self) -> set:
        return {oid for oid, (d, _) in self.values.items() if d is INF}

    def to_json(self) -> dict:
        vals = {}
        for oid in _representatives_to_store(self.part):
            d, nu = self.values[oid]
            entry = {"depth": fmt_depth_value(d)}
            if nu is not None:
                entry["nu"] = nu.to_json()
            vals[oid] = entry
        return {"values": vals}


def default_nu(part: OrbitPartition, oid: str, p: int, k: int) -> FqElem:
    """1, except on symmetric-unramified orbits where nu must be trace-zero.

    There the canonical choice is g^((Q0+1)/2) for the chosen generator g of
    F_Q^x, Q = Q0^2, which satisfies nu^Q0 = -nu.
    """
    o = part[oid]
    F = orbit_field(part, oid, p, k)
    if o.kind != "symmetric-unramified":
        return F.one
    q0 = p ** (k * o.f // 2)
    return F.primitive ** ((q0 + 1) // 2)


def make_covector(part: OrbitPartition, p: int, k: int, r, data: dict,
                  levi: list | None = None) -> CovectorProfile:
    """Orbits in ``levi`` get depth inf; others default to depth -r and nu = 1."""
    r = rational(r)
    levi = set(levi or [])
    values = {}
    for oid in levi:
        part[oid]
        values[oid] = (INF, None)
    for oid, entry in data.items():
        part[oid]
        F = orbit_field(part, oid, p, k)
        d = parse_depth_value(entry.get("depth", fmt_rational(-r)))
        if d is INF:
            nu = None
        elif "nu" in entry:
            nu = parse_ff(F, entry["nu"])
        else:
            nu = default_nu(part, oid, p, k)
        values[oid] = (d, nu)
    for o in part.orbits:
        if o.orbit_id in values:
            continue
        if o.neg_id in values:
            d, nu = values[o.neg_id]
            values[o.orbit_id] = (d, None if nu is None else -nu)
        elif o.neg_id in levi:
            values[o.orbit_id] = (INF, None)
        else:
            values[o.orbit_id] = (-r, default_nu(part, o.orbit_id, p, k))
    cv = CovectorProfile(part, p, k, r, values)
    errs = validate_covector(cv)
    if errs:
        raise ValidationError("; ".join(errs))
    return cv


def validate_covector(cv: CovectorProfile) -> list:
    out = []
    part = cv.part
    for o in part.orbits:
        oid = o.orbit_id
        if oid not in cv.values:
            out.append(f"orbit {oid}: missing covector data")
            continue
        d, nu = cv.values[oid]
        neg = cv.values.get(o.neg_id)
        if d is INF:
            if neg is not None and neg[0] is not INF:
                out.append(f"orbit {oid}: Levi roots must be closed under negation")
            continue
        if d != -cv.r:
            out.append(f"orbit {oid}: genericity needs depth -r off the Levi, got {fmt_rational(d)}")
        if (d * o.e).denominator != 1:
            out.append(f"orbit {oid}: depth not in (1/{o.e})Z")
        F = orbit_field(part, oid, cv.p, cv.k)
        if nu is None or nu.field is not F or nu.is_zero():
            out.append(f"orbit {oid}: nu must be a nonzero element of F_{F.q}")
            continue
        if neg is not None and o.neg_id != oid and neg[1] != -nu:
            out.append(f"orbit {oid}: nu of the negative orbit must be -nu")
        if o.kind == "symmetric-unramified":
            half = cv.p ** (cv.k * o.f // 2)
            if nu ** half != -nu:
                out.append(f"orbit {oid}: nu must satisfy nu^(q^(f/2)) = -nu")
        if o.kind == "symmetric-ramified" and (d * o.e) % 2 != 1:
            out.append(f"orbit {oid}: ramified symmetric root needs e*r odd")
    levi = cv.levi_roots
    if levi:
        span = rank_q(list(levi))
        for a in part.rd.roots:
            if a not in levi and rank_q(list(levi) + [a]) == span:
                out.append(f"Levi roots are not cut out by a subspace (missing {a})")
                break
    return out


# ---------------------------------------------------------------------------
# r-approximations


@dataclass(frozen=True)
class Approximation:
    r: Fraction
    gamma: ElementProfile

    @property
    def part(self) -> OrbitPartition:
        return self.gamma.part

    @property
    def root_h_ids(self) -> set:
        return centralizer_ids(self)

    @property
    def head(self) -> ElementProfile:
        return head_profile(self)


def centralizer_ids(ap: Approximation) -> set:
    cut = Depth(ap.r)
    return {oid for oid in ap.gamma.values if not ap.gamma.depth(oid) < cut}


def centralizer_roots(ap: Approximation) -> set:
    """Root_H: roots alpha with ord_gamma(alpha) >= r."""
    return ap.part.roots_in(centralizer_ids(ap))


def head_profile(ap: Approximation) -> ElementProfile:
    """gamma_{<r}: unchanged off Root_H, trivial on Root_H."""
    hids = centralizer_ids(ap)
    values = {}
    for oid, v in ap.gamma.values.items():
        if oid in hids:
            values[oid] = RootValue(INF, v.rho.field.one, None)
        else:
            values[oid] = v
    return replace(ap.gamma, values=values)


def transport_profile(profile: ElementProfile, transport) -> ElementProfile:
    """Relabel the orbit data along alpha -> w alpha; all values carried unchanged."""
    values = {transport.orbit_map[k]: v for k, v in profile.values.items()}
    return ElementProfile(transport.target, profile.p, profile.k, values, profile.bounded)


def transport_covector(cv: CovectorProfile, transport) -> CovectorProfile:
    values = {transport.orbit_map[k]: v for k, v in cv.values.items()}
    return CovectorProfile(transport.target, cv.p, cv.k, cv.r, values)
