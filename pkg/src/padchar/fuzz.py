"""Seeded random generators for the property harnesses.

Everything takes a ``random.Random`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction

from .apartment import point_from_coordinates, point_from_cosets
from .arith import INFINITY, Depth, Exact, fmt_rational
from .charform import ClassRecord, ConjClassTable, OrbitalOracle
from .elements import default_nu, make_covector, make_profile, orbit_field
from .errors import ValidationError
from .mp import DepthFunction, TorusLattice
from .rootgal import (
    GaloisModel,
    automorphism_group,
    fixed_rank,
    identity,
    mat_mul,
    mat_vec,
    orbits,
    pair,
    root_datum,
    weyl_group,
)
from .signs import SignContext, check_context, make_extra

SYSTEMS = ("A1", "A2", "C2", "B2")
PRIMES = (3, 5, 7, 11)
DEFAULT_SEED = 20240601


def default_seed() -> int:
    raw = os.environ.get("PADCHAR_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"PADCHAR_SEED must be an integer, got {raw!r}") from None


def rng_for(seed=None) -> random.Random:
    return random.Random(default_seed() if seed is None else seed)


def _order(m, cap=24):
    e = identity(len(m))
    g = m
    for k in range(1, cap + 1):
        if g == e:
            return k
        g = mat_mul(g, m)
    raise AssertionError("automorphism of unexpectedly large order")


# ---------------------------------------------------------------------------
# Galois models


def random_unramified_model(rng: random.Random, rd) -> GaloisModel:
    return GaloisModel(rng.choice(automorphism_group(rd)))


def random_galois_model(rng: random.Random, rd, ramified_share: float = 0.4) -> GaloisModel:
    """Unramified, or with a cyclic inertia group normalized by Frobenius."""
    auts = automorphism_group(rd)
    if rng.random() >= ramified_share:
        return GaloisModel(rng.choice(auts))
    for _ in range(200):
        i = rng.choice(auts)
        if i == identity(rd.rank):
            continue
        frob = rng.choice(auts)
        gm = GaloisModel(frob, (i,))
        try:
            gm.check(rd)
        except ValidationError:
            continue
        return gm
    return GaloisModel(rng.choice(auts))


# ---------------------------------------------------------------------------
# Points


def fixed_vectors(m) -> list:
    """A Q-basis of the fixed space of m (rows of an integer kernel basis)."""
    n = len(m)
    a = [[Fraction(m[i][j] - int(i == j)) for j in range(n)] for i in range(n)]
    # reduced row echelon form
    rows, piv = [r[:] for r in a], []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return basis


def random_coordinates(rng: random.Random, part, denominators=(1, 2, 3, 4, 6), tries=400):
    """Coordinates x whose root values are Gamma-invariant mod Z."""
    n = part.rd.rank
    for _ in range(tries):
        d = rng.choice(denominators)
        x = tuple(Fraction(rng.randrange(-2 * d, 2 * d + 1), d) for _ in range(n))
        try:
            return point_from_coordinates(part, "x", x).coordinates
        except ValidationError:
            continue
    return tuple(Fraction(0) for _ in range(n))


def translates(rng: random.Random, part, x, count: int) -> list:
    """Points x + v + lambda with v Frobenius-fixed and lambda integral.

    For an elliptic torus only the lattice translates remain.
    """
    basis = fixed_vectors(part.gm.frobenius) if part.gm.is_unramified else []
    out = []
    for _ in range(count):
        y = list(x)
        for b in basis:
            c = Fraction(rng.randrange(-12, 13), rng.choice((1, 2, 3, 5, 7)))
            y = [yi + c * bi for yi, bi in zip(y, b)]
        y = [yi + rng.randrange(-2, 3) for yi in y]
        out.append(tuple(y))
    return out


def random_point(rng: random.Random, part, name: str = "x"):
    if part.gm.is_unramified:
        return point_from_coordinates(part, name, random_coordinates(rng, part))
    cosets = {}
    for ids in part.pm_orbits():
        o = part[ids[0]]
        if o.symmetric:
            cosets[o.orbit_id] = rng.choice((Fraction(0), Fraction(1, 2 * o.e)))
        else:
            d = rng.choice((1, 2, 3, 4))
            cosets[o.orbit_id] = Fraction(rng.randrange(0, d), d * o.e)
    return point_from_cosets(part, name, {k: fmt_rational(v) for k, v in cosets.items()})


# ---------------------------------------------------------------------------
# Element profiles


def _random_unit(rng, F):
    while True:
        x = F.from_index(rng.randrange(1, F.q))
        if not x.is_zero():
            return x


def _random_value(rng, part, oid, p, k, d):
    """A {depth, residue?, lead} entry satisfying the local rules at depth d."""
    o = part[oid]
    F = orbit_field(part, oid, p, k)
    if o.kind == "symmetric-unramified":
        half = p ** (k * o.f // 2)
        if d == 0:
            # norm-one residues other than 1
            g = F.norm_one_generator
            rho = g ** rng.randrange(1, half + 1)
            return {"depth": fmt_rational(d), "residue": rho.to_json()}
        nu = default_nu(part, oid, p, k)
        sub = F.primitive ** ((F.q - 1) // (half - 1) * rng.randrange(0, half - 1))
        return {"depth": fmt_rational(d), "lead": (nu * sub).to_json()}
    if o.kind == "symmetric-ramified":
        if d == 0:
            return {"depth": "0", "residue": (-F.one).to_json()}
        return {"depth": fmt_rational(d), "lead": _random_unit(rng, F).to_json()}
    if d == 0:
        while True:
            rho = _random_unit(rng, F)
            if rho != F.one:
                return {"depth": "0", "residue": rho.to_json()}
    return {"depth": fmt_rational(d), "lead": _random_unit(rng, F).to_json()}


def _allowed_depth(o, d) -> bool:
    if (d * o.e).denominator != 1:
        return False
    if o.kind == "symmetric-ramified" and d > 0:
        return (d * o.e) % 2 == 1
    return True


def pseudo_levi_ids(rng: random.Random, part, tries=50) -> set:
    """Orbits {alpha : <alpha, s> in Z} for a random Gamma-stable torsion point s."""
    n = part.rd.rank
    for _ in range(tries):
        m = rng.choice((1, 2, 3, 4))
        s = tuple(Fraction(rng.randrange(0, m), m) for _ in range(n))
        ids = {o.orbit_id for o in part.orbits if all(pair(b, s).denominator == 1 for b in o.roots)}
        roots = {tuple(a) for a in part.rd.roots if pair(a, s).denominator == 1}
        if all(set(o.roots) <= roots or not (set(o.roots) & roots) for o in part.orbits):
            return ids
    return set()


def random_profile_data(rng: random.Random, part, p, k, r, h_ids=None) -> dict:
    """Depths >= r exactly on h_ids (a pseudo-Levi), below r elsewhere."""
    if h_ids is None:
        h_ids = pseudo_levi_ids(rng, part)
    data = {}
    for ids in part.pm_orbits():
        o = part[ids[0]]
        lo, hi = (r, r + 2) if o.orbit_id in h_ids else (Fraction(0), r)
        cands = []
        step = Fraction(1, 2 * o.e)
        v = lo
        while v < hi:
            if _allowed_depth(o, v) and (o.orbit_id not in h_ids or v >= r):
                cands.append(v)
            v += step
        if not cands:
            # no admissible depth in range: fall back to the first admissible one above lo
            v = lo
            while not _allowed_depth(o, v):
                v += step
            cands = [v]
        d = rng.choice(cands)
        data[o.orbit_id] = _random_value(rng, part, o.orbit_id, p, k, d)
    return data


def levi_ids(part, v) -> set:
    """Orbits of roots vanishing on the Frobenius orbit of the cocharacter v."""
    frob = part.gm.frobenius
    vecs = []
    cur = tuple(v)
    for _ in range(_order(frob)):
        vecs.append(cur)
        cur = mat_vec(frob, cur)
    for g in part.gm.inertia:
        vecs.extend(mat_vec(g, u) for u in list(vecs))
    return {o.orbit_id for o in part.orbits
            if all(pair(b, u) == 0 for b in o.roots for u in vecs)}


def random_levi(rng: random.Random, part) -> set:
    n = part.rd.rank
    if rng.random() < 0.4:
        return set()
    for _ in range(10):
        v = tuple(rng.randrange(-2, 3) for _ in range(n))
        ids = levi_ids(part, v)
        if ids:
            return ids
    return set()


def random_depth_r(rng: random.Random, part) -> Fraction:
    e = max((o.e for o in part.orbits), default=1)
    if e == 1:
        return Fraction(rng.randrange(1, 4))
    return Fraction(rng.randrange(1, 4 * e), e)


def random_context(rng: random.Random, system: str | None = None, unramified: bool = True,
                   tries: int = 40, ramified_share: float = 0.6) -> SignContext:
    """A validated SignContext on a random fixture."""
    last = None
    for _ in range(tries):
        name = system or rng.choice(SYSTEMS)
        rd = root_datum(name)
        gm = (random_unramified_model(rng, rd) if unramified
              else random_galois_model(rng, rd, ramified_share))
        p = rng.choice(PRIMES)
        k = 1
        q = p ** k
        part = orbits(rd, gm, q)
        if any(o.e % p == 0 for o in part.orbits):
            continue
        r = random_depth_r(rng, part)
        try:
            pt = random_point(rng, part)
            gamma = make_profile(part, p, k, random_profile_data(rng, part, p, k, r))
            levi = random_levi(rng, part)
            cv = make_covector(part, p, k, r, {}, sorted(levi))
            extras = {}
            for o in part.orbits:
                if o.kind == "symmetric-ramified":
                    spec = {"rank_pm": rng.randrange(0, 3), "kottwitz_sign": rng.choice((1, -1))}
                    extras[o.orbit_id] = make_extra(part, p, k, o.orbit_id, spec)
            return check_context(SignContext(part, pt, r, gamma, cv, extras))
        except ValidationError as exc:
            last = exc
            continue
    raise ValidationError(f"could not generate a valid random fixture: {last}")


def random_weyl_element(rng: random.Random, rd):
    return rng.choice(weyl_group(rd))


# ---------------------------------------------------------------------------
# Depth functions for the cardinality lemma


def _grid(rng, e, lo=-3, hi=3):
    den = e * rng.choice((1, 2, 3))
    return Fraction(rng.randrange(lo * den, hi * den + 1), den)


def random_fg(rng: random.Random, part):
    """(f, g) satisfying the cardinality lemma's hypotheses."""
    fv, gv = {}, {}
    for ids in part.pm_orbits():
        o = part[ids[0]]
        neg = o.neg_id
        if rng.random() < 0.1:
            for oid in ids:
                fv[oid] = INFINITY
                gv[oid] = INFINITY
            continue
        if o.symmetric:
            a = Fraction(rng.randrange(-6, 7), 2 * o.e)
            fv[o.orbit_id] = Depth(a)
            gv[o.orbit_id] = Depth(a + Fraction(rng.randrange(0, 7), 2 * o.e))
            continue
        a = _grid(rng, o.e)
        sa = Fraction(rng.randrange(-6, 7), o.e)
        fv[o.orbit_id], fv[neg] = Depth(a), Depth(sa - a)
        b = a + abs(_grid(rng, o.e, 0, 2))
        sb = sa + Fraction(rng.randrange(0, 7), o.e)
        # keep g(-alpha) >= f(-alpha)
        lo_b = b
        while sb - lo_b < sa - a:
            sb += Fraction(1, o.e)
        gv[o.orbit_id], gv[neg] = Depth(lo_b), Depth(sb - lo_b)
    t0 = _grid(rng, 1)
    t1 = t0 + abs(_grid(rng, 1, 0, 2))
    return DepthFunction(Depth(t0), fv), DepthFunction(Depth(t1), gv)


def random_torus_lattice(rng: random.Random, part) -> TorusLattice:
    if rng.random() < 0.5:
        return TorusLattice.default(part.rd.rank, part.q)
    lines = []
    for _ in range(part.rd.rank):
        e = rng.choice((1, 2))
        lines.append((Fraction(rng.randrange(0, 4), 4 * e), e, part.q ** rng.choice((1, 2))))
    return TorusLattice(tuple(lines))


def random_gxf_instance(rng: random.Random, system: str):
    rd = root_datum(system)
    for _ in range(50):
        gm = random_galois_model(rng, rd)
        p = rng.choice(PRIMES)
        part = orbits(rd, gm, p)
        try:
            pt = random_point(rng, part)
        except ValidationError:
            continue
        f, g = random_fg(rng, part)
        return part, pt, f, g, random_torus_lattice(rng, part)
    raise ValidationError(f"could not generate a cardinality instance for {system}")


# ---------------------------------------------------------------------------
# Class tables and oracles for the stability harness


def synthetic_setting(rng: random.Random, ctx: SignContext, classes: int = 1):
    """A class table with w = identity classes and symbolic transfer-consistent oracles."""
    recs = [ClassRecord("c0", identity(ctx.part.rd.rank), None, True, True, "S0")]
    for i in range(1, classes):
        recs.append(ClassRecord(f"c{i}", identity(ctx.part.rd.rank), None, True, True, f"S{i}"))
    table = ConjClassTable(recs, {})
    theta = {rec.class_id: Exact.of(1, f"theta{i}") for i, rec in enumerate(recs)}
    so = OrbitalOracle({(rec.key_h_stable(), "gamma"): Exact.symbol(f"SO{i}")
                        for i, rec in enumerate(recs)}, stable_mode=True)
    return table, theta, so


def is_elliptic(part) -> bool:
    return fixed_rank(part.gm.frobenius) == 0


__all__ = [
    "SYSTEMS", "default_seed", "rng_for", "random_context", "random_point", "random_coordinates",
    "translates", "random_weyl_element", "random_fg", "random_gxf_instance", "synthetic_setting",
    "is_elliptic", "levi_ids", "pseudo_levi_ids", "fixed_vectors",
]
