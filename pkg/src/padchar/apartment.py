"""Apartment points modeled by their affine valuation cosets ord_x(alpha).

For an orbit with ramification e the coset lives in Q / (1/e)Z and is stored
by its representative in [0, 1/e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import Depth, depth, fmt_rational, rational
from .errors import ValidationError
from .rootgal import OrbitInfo, OrbitPartition, contragredient, mat_vec, pair, parse_root, root_key

FROM_COORDINATES = "from_coordinates"
EXPLICIT = "explicit_cosets"


def reduce_mod(c: Fraction, e: int) -> Fraction:
    """Representative of c + (1/e)Z in [0, 1/e)."""
    step = Fraction(1, e)
    return c - step * math.floor(c / step)


@dataclass(frozen=True)
class ApartmentPoint:
    name: str
    mode: str
    cosets: dict  # orbit_id -> Fraction in [0, 1/e)
    coordinates: tuple | None = None

    def coset(self, oid: str) -> Fraction:
        try:
            return self.cosets[oid]
        except KeyError:
            raise ValidationError(f"point {self.name!r} has no coset for orbit {oid}") from None

    def to_json(self, part: OrbitPartition | None = None) -> dict:
        if self.mode == FROM_COORDINATES:
            return {"coordinates": [fmt_rational(x) for x in self.coordinates]}
        return {"cosets": {k: fmt_rational(v) for k, v in sorted(self.cosets.items())}}


def point_from_coordinates(part: OrbitPartition, name: str, coords) -> ApartmentPoint:
    """ord_x(alpha) = <alpha, x> + Z, for a torus split over the unramified extension."""
    if not part.gm.is_unramified:
        raise ValidationError(
            f"point {name!r}: coordinates need trivial inertia; give explicit cosets instead"
        )
    x = tuple(rational(c) for c in coords)
    if len(x) != part.rd.rank:
        raise ValidationError(f"point {name!r}: expected {part.rd.rank} coordinates")
    for o in part.orbits:
        base = pair(o.rep, x)
        for b in o.roots:
            if (pair(b, x) - base).denominator != 1:
                raise ValidationError(
                    f"point {name!r} is not Galois-fixed: <{b}, x> and <{o.rep}, x> differ mod Z"
                )
    cosets = {o.orbit_id: reduce_mod(pair(o.rep, x), 1) for o in part.orbits}
    pt = ApartmentPoint(name, FROM_COORDINATES, cosets, x)
    _raise_on(validate_point(part, pt))
    return pt


def point_from_cosets(part: OrbitPartition, name: str, given: dict) -> ApartmentPoint:
    """Explicit cosets keyed by orbit id; missing negatives are filled by antisymmetry."""
    cosets = {}
    for key, val in given.items():
        a = parse_root(key)
        o = part.orbit_of(a)
        if o.rep != a:
            raise ValidationError(
                f"point {name!r}: coset key {key} is not an orbit representative (use {o.orbit_id})"
            )
        cosets[o.orbit_id] = reduce_mod(rational(val), o.e)
    for o in part.orbits:
        if o.orbit_id not in cosets:
            if o.neg_id in given or o.neg_id in cosets:
                cosets[o.orbit_id] = reduce_mod(-cosets[o.neg_id], o.e)
            else:
                raise ValidationError(f"point {name!r}: no coset for orbit {o.orbit_id}")
    pt = ApartmentPoint(name, EXPLICIT, cosets)
    _raise_on(validate_point(part, pt))
    return pt


def make_point(part: OrbitPartition, name: str, spec: dict) -> ApartmentPoint:
    if "coordinates" in spec and "cosets" in spec:
        raise ValidationError(f"point {name!r}: give coordinates or cosets, not both")
    if "coordinates" in spec:
        return point_from_coordinates(part, name, spec["coordinates"])
    if "cosets" in spec:
        return point_from_cosets(part, name, spec["cosets"])
    raise ValidationError(f"point {name!r}: needs coordinates or cosets")


def validate_point(part: OrbitPartition, pt: ApartmentPoint) -> list:
    """Violations of the coset rules: antisymmetry and the symmetric-root constraint."""
    out = []
    for o in part.orbits:
        if o.orbit_id not in pt.cosets:
            out.append(f"orbit {o.orbit_id}: missing coset")
            continue
        c = pt.cosets[o.orbit_id]
        neg = pt.cosets.get(o.neg_id)
        if neg is not None and reduce_mod(c + neg, o.e) != 0:
            out.append(f"orbit {o.orbit_id}: ord_x(-alpha) != -ord_x(alpha)")
        if o.symmetric and c not in (Fraction(0), Fraction(1, 2 * o.e)):
            out.append(f"orbit {o.orbit_id}: symmetric coset must be Z_alpha or Z_alpha + 1/(2e)")
    return out


def _raise_on(violations: list) -> None:
    if violations:
        raise ValidationError("; ".join(violations))


def ord_x_contains(pt: ApartmentPoint, orbit: OrbitInfo, d) -> bool:
    """Whether d lies in the coset ord_x(alpha)."""
    d = rational(d)
    return reduce_mod(d - pt.coset(orbit.orbit_id), orbit.e) == 0


def count_coset_points(pt: ApartmentPoint, orbit: OrbitInfo, lo, hi) -> int:
    """Number of elements of ord_x(alpha) in the half-open depth interval [lo, hi)."""
    return count_in_coset(pt.coset(orbit.orbit_id), orbit.e, depth(lo), depth(hi))


def count_in_coset(c: Fraction, e: int, lo: Depth, hi: Depth) -> int:
    if lo.is_infinite or hi.is_infinite:
        raise ValidationError("interval must be bounded")
    if hi < lo:
        raise ValidationError(f"empty interval: {lo} > {hi}")
    # elements are c + k/e; translate the bounds into bounds on k
    a = (lo.value - c) * e
    b = (hi.value - c) * e
    kmin = math.floor(a) + 1 if lo.plus else math.ceil(a)
    kmax = math.floor(b) if hi.plus else math.ceil(b) - 1
    return max(0, kmax - kmin + 1)


def transport_point(pt: ApartmentPoint, transport) -> ApartmentPoint:
    """The same point seen through the relabeling alpha -> w alpha."""
    cosets = {transport.orbit_map[k]: v for k, v in pt.cosets.items()}
    coords = None
    if pt.coordinates is not None:
        coords = mat_vec(contragredient(transport.w), pt.coordinates)
    return ApartmentPoint(pt.name, pt.mode, cosets, coords)


def root_coset_table(part: OrbitPartition, pt: ApartmentPoint) -> dict:
    """Coset representative for every individual root (keyed by root string)."""
    return {root_key(a): pt.cosets[part.of_root[a]] for a in part.rd.roots}
