"""Root data, finite Galois models acting on X*, and orbit classification.

Lattice vectors are tuples of ints. Matrices are tuples of rows and act on
column vectors, so ``mat_vec(M, v)`` is M v. The contragredient action of a
matrix g on X_* is (g^-1)^T, which keeps the pairing invariant.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ValidationError

Vec = tuple  # tuple[int, ...]
Mat = tuple  # tuple[tuple[int, ...], ...]

MAX_GROUP_ORDER = 20000


# ---------------------------------------------------------------------------
# Small exact linear algebra


def identity(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def as_mat(rows) -> Mat:
    try:
        m = tuple(tuple(int(x) for x in row) for row in rows)
    except (TypeError, ValueError):
        raise ValidationError(f"not a square integer matrix: {rows!r}") from None
    if not m or any(len(row) != len(m) for row in m):
        raise ValidationError(f"not a square integer matrix: {rows!r}")
    return m


def mat_vec(m: Mat, v: Sequence[int]) -> Vec:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def neg_mat(m: Mat) -> Mat:
    return tuple(tuple(-x for x in row) for row in m)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots = []
    lead = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(lead, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        inv = 1 / rows[lead][c]
        rows[lead] = [x * inv for x in rows[lead]]
        for i in range(len(rows)):
            if i != lead and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[lead])]
        pivots.append(c)
        lead += 1
        if lead == len(rows):
            break
    return rows, pivots


def rank_q(rows) -> int:
    """Rank over Q of a list of integer or rational rows."""
    rows = [[Fraction(x) for x in r] for r in rows]
    if not rows:
        return 0
    return len(_rref(rows)[1])


def mat_inverse(m: Mat) -> Mat:
    """Inverse of a unimodular integer matrix; raises if not unimodular."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    red, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise ValidationError(f"matrix is singular: {m!r}")
    inv = [row[n:] for row in red]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValidationError(f"matrix is not invertible over Z: {m!r}")
    return tuple(tuple(int(x) for x in row) for row in inv)


def contragredient(m: Mat) -> Mat:
    return transpose(mat_inverse(m))


def pair(a: Sequence, c: Sequence):
    return sum(x * y for x, y in zip(a, c))


def fixed_rank(m: Mat) -> int:
    """Dimension of the fixed space of m on the rational span."""
    n = len(m)
    return n - rank_q([[m[i][j] - int(i == j) for j in range(n)] for i in range(n)])


def root_key(v: Sequence[int]) -> str:
    return ",".join(str(int(x)) for x in v)


def parse_root(s) -> Vec:
    if isinstance(s, str):
        try:
            return tuple(int(x) for x in s.split(","))
        except ValueError:
            raise ValidationError(f"bad root key {s!r}") from None
    return tuple(int(x) for x in s)


# ---------------------------------------------------------------------------
# Root data


@dataclass(frozen=True)
class RootDatum:
    """Roots in X* and matching coroots in X_*, both in Z^rank."""

    rank: int
    roots: tuple
    coroots: tuple
    name: str = ""

    def __post_init__(self):
        roots = tuple(tuple(int(x) for x in r) for r in self.roots)
        coroots = tuple(tuple(int(x) for x in c) for c in self.coroots)
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "coroots", coroots)
        self._check()

    def _check(self):
        n = self.rank
        if len(self.roots) != len(self.coroots):
            raise ValidationError("roots and coroots must have the same length")
        if len(set(self.roots)) != len(self.roots):
            raise ValidationError("duplicate roots")
        for a, c in zip(self.roots, self.coroots):
            if len(a) != n or len(c) != n:
                raise ValidationError(f"root or coroot of wrong length: {a}, {c}")
            if pair(a, c) != 2:
                raise ValidationError(f"<{a}, {c}> != 2")
        rs = set(self.roots)
        for a in self.roots:
            if tuple(-x for x in a) not in rs:
                raise ValidationError(f"negation of root {a} is missing")
            if tuple(2 * x for x in a) in rs:
                raise ValidationError(f"root system is not reduced at {a}")
        for a in self.roots:
            for b in self.roots:
                if self.reflect(a, b) not in rs:
                    raise ValidationError(f"s_{a} does not preserve the roots")
            for c in self.coroots:
                if self.coreflect(a, c) not in set(self.coroots):
                    raise ValidationError(f"s_{a} does not preserve the coroots")

    @functools.cached_property
    def index(self) -> dict:
        return {a: i for i, a in enumerate(self.roots)}

    def coroot(self, a: Vec) -> Vec:
        try:
            return self.coroots[self.index[tuple(a)]]
        except KeyError:
            raise ValidationError(f"{a} is not a root") from None

    def is_root(self, a) -> bool:
        return tuple(a) in self.index

    def reflect(self, a: Vec, v: Vec) -> Vec:
        """s_a(v) = v - <v, a^vee> a on X*."""
        c = self.coroot(a)
        k = pair(v, c)
        return tuple(x - k * y for x, y in zip(v, a))

    def coreflect(self, a: Vec, c: Vec) -> Vec:
        """s_a on X_*: c - <a, c> a^vee."""
        k = pair(a, c)
        av = self.coroot(a)
        return tuple(x - k * y for x, y in zip(c, av))

    def reflection_matrix(self, a: Vec) -> Mat:
        n = self.rank
        cols = [self.reflect(a, tuple(int(i == j) for j in range(n))) for i in range(n)]
        return transpose(tuple(cols))

    def preserves_roots(self, m: Mat) -> bool:
        rs = set(self.roots)
        return all(mat_vec(m, a) in rs for a in self.roots)

    def check_automorphism(self, m: Mat) -> None:
        """Raise unless m is a lattice automorphism carrying the datum to itself."""
        m = as_mat(m)
        if len(m) != self.rank:
            raise ValidationError(f"matrix size {len(m)} != rank {self.rank}")
        mv = contragredient(m)
        for a, c in zip(self.roots, self.coroots):
            b = mat_vec(m, a)
            if b not in self.index:
                raise ValidationError(f"matrix maps root {a} to non-root {b}")
            if mat_vec(mv, c) != self.coroot(b):
                raise ValidationError(f"matrix does not carry the coroot of {a} to that of {b}")

    def subsystem_base(self, subset: Iterable[Vec]) -> list:
        """Simple roots of a root subsystem for a fixed generic positivity."""
        subset = [tuple(a) for a in subset]
        pos = [a for a in subset if _height(a) > 0]
        ps = set(pos)
        simple = []
        for a in pos:
            decomposable = any(
                tuple(x - y for x, y in zip(a, b)) in ps for b in pos if b != a
            )
            if not decomposable:
                simple.append(a)
        return sorted(simple)


def _height(v: Sequence[int]) -> int:
    # generic linear functional: weights 1, K, K^2, ... dominate lexicographically
    k = 1
    total = 0
    for x in reversed(v):
        total += x * k
        k *= 1009
    return total


def _from_cartan(cartan: Sequence[Sequence[int]], name: str) -> RootDatum:
    """Adjoint datum: X* = root lattice on simple roots, X_* = coweights.

    cartan[i][j] = <alpha_j, alpha_i^vee>.
    """
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    simple_co = [tuple(cartan[i][j] for j in range(n)) for i in range(n)]
    pairs = {(a, c) for a, c in zip(simple, simple_co)}
    frontier = list(pairs)
    while frontier:
        nxt = []
        for a, c in frontier:
            for s, sc in zip(simple, simple_co):
                k = pair(a, sc)
                b = tuple(x - k * y for x, y in zip(a, s))
                kk = pair(s, c)
                bc = tuple(x - kk * y for x, y in zip(c, sc))
                if (b, bc) not in pairs:
                    pairs.add((b, bc))
                    nxt.append((b, bc))
        frontier = nxt
    ordered = sorted(pairs, key=lambda p: (_height(p[0]) < 0, -abs(_height(p[0])), p[0]))
    return RootDatum(n, tuple(p[0] for p in ordered), tuple(p[1] for p in ordered), name)


CARTAN = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    # alpha_1 short, alpha_2 long
    "C2": ((2, -2), (-1, 2)),
    # alpha_1 long, alpha_2 short
    "B2": ((2, -1), (-2, 2)),
}


def root_datum(name: str) -> RootDatum:
    """Catalog: adjoint A1 (= PGL2), A2, B2, C2 (= PGSp4), plus GL2."""
    key = name.upper()
    if key == "PGL2":
        key = "A1"
    if key == "PGSP4":
        key = "C2"
    if key in CARTAN:
        return _from_cartan(CARTAN[key], key)
    if key == "GL2":
        return RootDatum(2, ((1, -1), (-1, 1)), ((1, -1), (-1, 1)), "GL2")
    raise ValidationError(f"unknown root datum {name!r}")


def positive_roots(rd: RootDatum) -> list:
    return [a for a in rd.roots if _height(a) > 0]


def simple_roots(rd: RootDatum) -> list:
    return rd.subsystem_base(rd.roots)


def weyl_group(rd: RootDatum) -> list:
    gens = [rd.reflection_matrix(a) for a in simple_roots(rd)]
    return generate_group(gens, rd.rank)


def automorphism_group(rd: RootDatum) -> list:
    """All lattice automorphisms preserving the datum (Weyl group times diagram symmetries).

    Found as W-translates of the base-preserving automorphisms; the latter are
    determined by the images of the simple roots when X* is spanned by roots.
    """
    n = rd.rank
    simple = simple_roots(rd)
    W = weyl_group(rd)
    if rank_q(simple) != n or len(simple) != n:
        out = {identity(n), neg_mat(identity(n))}
        out = [m for m in out if _is_aut(rd, m)]
        return sorted({mat_mul(w, m) for w in W for m in out})
    import itertools

    base_auts = []
    basis_inv = _rational_inverse(transpose(tuple(simple)))
    for perm in itertools.permutations(simple):
        img = transpose(tuple(perm))
        m = _mat_mul_q(img, basis_inv)
        if all(x.denominator == 1 for row in m for x in row):
            mi = tuple(tuple(int(x) for x in row) for row in m)
            if _is_aut(rd, mi):
                base_auts.append(mi)
    return sorted({mat_mul(w, m) for w in W for m in base_auts})


def _rational_inverse(m: Mat):
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    red, piv = _rref(aug)
    if piv[:n] != list(range(n)):
        raise ValidationError("singular matrix")
    return tuple(tuple(row[n:]) for row in red)


def _mat_mul_q(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum(Fraction(x) * y for x, y in zip(row, col)) for col in cols) for row in a)


def _is_aut(rd: RootDatum, m: Mat) -> bool:
    try:
        rd.check_automorphism(m)
    except ValidationError:
        return False
    return True


def generate_group(gens: Sequence[Mat], n: int) -> list:
    """All products of the generators (a finite matrix group), identity first."""
    e = identity(n)
    seen = {e}
    order = [e]
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mat_mul(s, g)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    nxt.append(h)
                    if len(seen) > MAX_GROUP_ORDER:
                        raise ValidationError("generated group is too large (infinite?)")
        frontier = nxt
    return order


# ---------------------------------------------------------------------------
# Galois models


@dataclass(frozen=True)
class GaloisModel:
    """A finite group acting on X*, generated by inertia and one Frobenius."""

    frobenius: Mat
    inertia_generators: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "frobenius", as_mat(self.frobenius))
        object.__setattr__(
            self, "inertia_generators", tuple(as_mat(g) for g in self.inertia_generators)
        )

    @property
    def rank(self) -> int:
        return len(self.frobenius)

    @functools.cached_property
    def inertia(self) -> list:
        return generate_group(self.inertia_generators, self.rank)

    @functools.cached_property
    def group(self) -> list:
        return generate_group((self.frobenius,) + self.inertia_generators, self.rank)

    @property
    def is_unramified(self) -> bool:
        return len(self.inertia) == 1

    def check(self, rd: RootDatum) -> None:
        if self.rank != rd.rank:
            raise ValidationError("Galois model and root datum have different ranks")
        for g in (self.frobenius,) + self.inertia_generators:
            rd.check_automorphism(g)
        inert = set(self.inertia)
        finv = mat_inverse(self.frobenius)
        for h in self.inertia_generators:
            if mat_mul(mat_mul(self.frobenius, h), finv) not in inert:
                raise ValidationError("inertia is not normalized by Frobenius")

    def conjugate(self, w: Mat) -> "GaloisModel":
        wi = mat_inverse(w)
        return GaloisModel(
            mat_mul(mat_mul(w, self.frobenius), wi),
            tuple(mat_mul(mat_mul(w, g), wi) for g in self.inertia_generators),
        )


NONSYMMETRIC = "nonsymmetric"
SYMM_UNRAM = "symmetric-unramified"
SYMM_RAM = "symmetric-ramified"


@dataclass(frozen=True)
class OrbitInfo:
    orbit_id: str
    rep: Vec
    roots: tuple
    n: int
    e: int
    f: int
    kind: str
    sigma_witness: Mat | None
    neg_id: str
    q_alpha: int | None = None

    @property
    def symmetric(self) -> bool:
        return self.kind != NONSYMMETRIC

    @property
    def ramified(self) -> bool:
        return self.kind == SYMM_RAM

    def invariants(self) -> tuple:
        return (self.n, self.e, self.f, self.q_alpha, self.kind)


@dataclass
class OrbitPartition:
    """Gamma-orbits of a root system together with the negation pairing."""

    rd: RootDatum
    gm: GaloisModel
    orbits: list
    of_root: dict = dc_field(default_factory=dict)
    q: int | None = None

    def __post_init__(self):
        self.by_id = {o.orbit_id: o for o in self.orbits}
        for o in self.orbits:
            for a in o.roots:
                self.of_root[a] = o.orbit_id

    def __iter__(self):
        return iter(self.orbits)

    def __len__(self):
        return len(self.orbits)

    def __getitem__(self, oid: str) -> OrbitInfo:
        try:
            return self.by_id[oid]
        except KeyError:
            raise ValidationError(f"unknown orbit {oid!r}") from None

    def orbit_of(self, a) -> OrbitInfo:
        try:
            return self.by_id[self.of_root[tuple(a)]]
        except KeyError:
            raise ValidationError(f"{a} is not a root") from None

    def pm_orbits(self) -> list:
        """+-Gamma-orbits as tuples of orbit ids (length 1 when symmetric)."""
        seen = set()
        out = []
        for o in self.orbits:
            if o.orbit_id in seen:
                continue
            ids = (o.orbit_id,) if o.neg_id == o.orbit_id else (o.orbit_id, o.neg_id)
            seen.update(ids)
            out.append(ids)
        return out

    def roots_in(self, ids: Iterable[str]) -> set:
        out = set()
        for i in ids:
            out.update(self[i].roots)
        return out

    def ids_for_roots(self, roots: Iterable) -> set:
        return {self.of_root[tuple(a)] for a in roots}


def orbits(rd: RootDatum, gm: GaloisModel, q: int | None = None,
           prefer: Iterable = ()) -> OrbitPartition:
    """Partition the roots into Gamma-orbits and classify each orbit.

    Representatives are the first root of each orbit in ``prefer`` order,
    then in the datum's order (positive roots first); the orbit of -alpha is
    represented by -rep whenever it is a different orbit.
    """
    gm.check(rd)
    group = gm.group
    inertia = gm.inertia
    order = [tuple(a) for a in prefer] + list(rd.roots)
    assigned: dict = {}
    result = []
    for a in order:
        if a in assigned:
            continue
        if not rd.is_root(a):
            raise ValidationError(f"preferred representative {a} is not a root")
        orb = {mat_vec(g, a) for g in group}
        neg = tuple(-x for x in a)
        reps = [a]
        if neg not in orb:
            reps.append(neg)
        for rep in reps:
            o = _classify(rep, group, inertia, q)
            result.append(o)
            for b in o.roots:
                assigned[b] = o.orbit_id
    return OrbitPartition(rd, gm, result, q=q)


def _classify(a: Vec, group, inertia, q) -> OrbitInfo:
    orb = sorted({mat_vec(g, a) for g in group})
    iorb = {mat_vec(g, a) for g in inertia}
    n, e = len(orb), len(iorb)
    if n % e:
        raise AssertionError("inertia orbit size does not divide orbit size")
    f = n // e
    neg = tuple(-x for x in a)
    witness = None
    if neg in iorb:
        kind = SYMM_RAM
        witness = next(g for g in inertia if mat_vec(g, a) == neg)
    elif neg in orb:
        kind = SYMM_UNRAM
        witness = next(g for g in group if mat_vec(g, a) == neg)
    else:
        kind = NONSYMMETRIC
    oid = root_key(a)
    neg_id = oid if kind != NONSYMMETRIC else root_key(neg)
    return OrbitInfo(oid, a, tuple(orb), n, e, f, kind, witness, neg_id,
                     q ** f if q is not None else None)


# ---------------------------------------------------------------------------
# Transport along lattice automorphisms


@dataclass
class Transport:
    w: Mat
    root_map: dict
    orbit_map: dict
    source: OrbitPartition
    target: OrbitPartition

    @property
    def galois(self) -> GaloisModel:
        return self.target.gm


def weyl_transport(rd: RootDatum, gm: GaloisModel, w, q: int | None = None,
                   source: OrbitPartition | None = None) -> Transport:
    """Relabel roots along alpha -> w alpha and conjugate the Galois model by w."""
    w = as_mat(w)
    rd.check_automorphism(w)
    src = source if source is not None else orbits(rd, gm, q)
    gm2 = gm.conjugate(w)
    root_map = {a: mat_vec(w, a) for a in rd.roots}
    tgt = orbits(rd, gm2, src.q, prefer=[root_map[o.rep] for o in src.orbits])
    orbit_map = {}
    for o in src.orbits:
        o2 = tgt.orbit_of(root_map[o.rep])
        if o2.rep != root_map[o.rep]:
            raise AssertionError("transported representative was not preserved")
        if o2.invariants() != o.invariants():
            raise AssertionError(f"transport changed the invariants of orbit {o.orbit_id}")
        if {root_map[b] for b in o.roots} != set(o2.roots):
            raise AssertionError("transport does not map orbits to orbits")
        orbit_map[o.orbit_id] = o2.orbit_id
    for o in src.orbits:
        if orbit_map[o.neg_id] != tgt[orbit_map[o.orbit_id]].neg_id:
            raise AssertionError("transport does not respect negation")
    return Transport(w, root_map, orbit_map, src, tgt)


# ---------------------------------------------------------------------------
# Split ranks


def split_rank(rd: RootDatum, frobenius: Mat, subsystem: Iterable) -> int:
    """F-rank of a connected reductive group with unramified maximal torus.

    ``subsystem`` is the root system of its reductive quotient at a point of
    the torus's building. Frobenius is moved by a Weyl element of that
    subsystem until it preserves a base; the rank is then the dimension of
    the fixed space on X* (x) Q.
    """
    sub = [tuple(a) for a in subsystem]
    subset = set(sub)
    frob = as_mat(frobenius)
    if any(mat_vec(frob, a) not in subset for a in sub):
        raise ValidationError("Frobenius does not preserve the subsystem")
    base = rd.subsystem_base(sub)
    positive = {a for a in sub if _height(a) > 0}
    tau = frob
    image = [mat_vec(tau, a) for a in base]
    for _ in range(len(sub) + 1):
        bad = next((b for b in image if b not in positive), None)
        if bad is None:
            break
        s = rd.reflection_matrix(bad)
        tau = mat_mul(s, tau)
        image = [mat_vec(tau, a) for a in base]
    else:
        raise AssertionError("failed to normalize Frobenius to preserve a base")
    if set(image) != set(base):
        raise AssertionError("normalized Frobenius does not preserve the base")
    return fixed_rank(tau)
