"""JSON scenario files (schema "padchar/1"): parsing, validation, serialization.

Rationals are strings "n/d"; finite-field elements are coefficient arrays,
low degree first, or {"gen_pow": k} / {"norm_one_pow": k}. Orbit ids are
the comma-joined coordinates of the orbit representative, e.g. "1,0".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

from .apartment import make_point
from .arith import Exact, fmt_rational, parse_exact, rational
from .charform import ConjClassTable, OrbitalOracle, class_table_from_json, class_table_to_json
from .elements import make_covector, make_profile
from .errors import ValidationError
from .rootgal import (
    GaloisModel,
    RootDatum,
    as_mat,
    identity,
    neg_mat,
    orbits,
    parse_root,
    root_datum,
)
from .signs import SignContext, check_context, make_extra, parse_rank_dict

SCHEMA = "padchar/1"

RANK_KEYS = {"G": "G", "G'": "Gprime", "H": "H", "H'": "Hprime"}


def parse_w(spec, rd: RootDatum):
    """identity | neg | reflection:<root> | integer matrix."""
    n = rd.rank
    if spec is None or spec == "identity":
        return identity(n)
    if spec == "neg":
        return neg_mat(identity(n))
    if isinstance(spec, str) and spec.startswith("reflection:"):
        a = parse_root(spec.split(":", 1)[1])
        if not rd.is_root(a):
            raise ValidationError(f"{spec}: not a root")
        return rd.reflection_matrix(a)
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError:
            raise ValidationError(f"bad twist specification {spec!r}") from None
    return as_mat(spec)


def _parse_root_datum(obj) -> RootDatum:
    if "type" in obj:
        return root_datum(obj["type"])
    return RootDatum(int(obj["rank"]), obj["roots"], obj["coroots"], obj.get("name", ""))


def _root_datum_json(rd: RootDatum, raw: dict) -> dict:
    if "type" in raw:
        return {"type": raw["type"]}
    return {"rank": rd.rank, "roots": [list(a) for a in rd.roots],
            "coroots": [list(c) for c in rd.coroots]}


@dataclass
class Scenario:
    name: str
    rd: RootDatum
    rd_raw: dict
    gm: GaloisModel
    p: int
    f: int
    r: Fraction
    points: dict  # name -> raw spec
    point: str
    gamma_raw: dict
    xstar_raw: dict
    ranks: dict | None
    extras_raw: dict
    classes_raw: list
    oracles_raw: dict
    theta_raw: dict
    flags: dict
    partner_raw: dict | None = None
    element_id: str = "gamma"
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.f

    def partition(self):
        if "part" not in self._cache:
            self._cache["part"] = orbits(self.rd, self.gm, self.q)
        return self._cache["part"]

    def context(self) -> SignContext:
        if "ctx" in self._cache:
            return self._cache["ctx"]
        part = self.partition()
        if self.point not in self.points:
            raise ValidationError(f"unknown point {self.point!r}")
        pt = make_point(part, self.point, self.points[self.point])
        gamma = make_profile(part, self.p, self.f, self.gamma_raw.get("values", {}),
                             bool(self.gamma_raw.get("bounded", True)))
        xstar = make_covector(part, self.p, self.f, self.r, self.xstar_raw.get("values", {}),
                              self.xstar_raw.get("levi", []))
        extras = {oid: make_extra(part, self.p, self.f, oid, spec)
                  for oid, spec in self.extras_raw.items()}
        for oid in extras:
            part[oid]
        ctx = check_context(SignContext(part, pt, self.r, gamma, xstar, extras, self.ranks))
        self._cache["ctx"] = ctx
        return ctx

    def class_table(self) -> ConjClassTable:
        rows = self.classes_raw or [{"id": "base"}]
        rows = [dict(row, w=parse_w(row.get("w"), self.rd)) for row in rows]
        return class_table_from_json(rows, self.points, self.rd.rank)

    def char_values(self) -> dict:
        table = self.class_table()
        out = {}
        for c in table.classes:
            if c.class_id in self.theta_raw:
                out[c.class_id] = parse_exact(self.theta_raw[c.class_id])
        return out

    def orbital_oracle(self) -> OrbitalOracle:
        return _oracle(self.oracles_raw.get("orbital", []), False, self.element_id)

    def stable_oracle(self) -> OrbitalOracle:
        return _oracle(self.oracles_raw.get("stable", []), True, self.element_id)

    def validate(self) -> list:
        """All problems found while building every section."""
        errs = []
        try:
            ctx = self.context()
        except ValidationError as exc:
            return [str(exc)]
        if self.flags.get("unramified_split") and not self.gm.is_unramified:
            errs.append("flag unramified_split is set but inertia acts nontrivially")
        for name, spec in self.points.items():
            try:
                make_point(self.partition(), name, spec)
            except ValidationError as exc:
                errs.append(str(exc))
        try:
            table = self.class_table()
            self.orbital_oracle()
            self.stable_oracle()
            self.char_values()
            from .charform import class_context

            for rec in table.classes:
                class_context(ctx, table, rec)
        except ValidationError as exc:
            errs.append(str(exc))
        if self.partner_raw:
            try:
                parse_w(self.partner_raw.get("twist"), self.rd)
            except ValidationError as exc:
                errs.append(str(exc))
        return errs

    def to_json(self) -> dict:
        ctx = self.context()
        out = {
            "schema": SCHEMA,
            "name": self.name,
            "root_datum": _root_datum_json(self.rd, self.rd_raw),
            "galois": {
                "frobenius": [list(r) for r in self.gm.frobenius],
                "inertia": [[list(r) for r in g] for g in self.gm.inertia_generators],
            },
            "residue_field": {"p": self.p, "f": self.f},
            "depth_r": fmt_rational(self.r),
            "points": {k: _canon_point(v) for k, v in sorted(self.points.items())},
            "point": self.point,
            "gamma": dict(ctx.gamma.to_json(), element_id=self.element_id),
            "xstar": {
                "levi": sorted(ctx.xstar.levi_ids),
                **ctx.xstar.to_json(),
            },
            "ramified_extras": {k: v.to_json() for k, v in sorted(ctx.ramified_extras.items())},
            "classes": class_table_to_json(self.class_table()),
            "oracles": {
                "orbital": _oracle_json(self.orbital_oracle(), "class"),
                "stable": _oracle_json(self.stable_oracle(), "class"),
            },
            "theta_values": {k: v.to_json() for k, v in sorted(self.char_values().items())},
            "flags": dict(sorted(self.flags.items())),
        }
        if self.ranks is not None:
            out["ranks"] = {RANK_KEYS[k]: v for k, v in self.ranks.items()}
        if self.partner_raw is not None:
            out["stable_partner"] = self.partner_raw
        return out


def _canon_point(spec: dict) -> dict:
    if "coordinates" in spec:
        return {"coordinates": [fmt_rational(rational(c)) for c in spec["coordinates"]]}
    return {"cosets": {k: fmt_rational(rational(v)) for k, v in sorted(spec["cosets"].items())}}


def _oracle(rows: list, stable: bool, default_element: str) -> OrbitalOracle:
    entries = {}
    for row in rows:
        key = (str(row["class"]), str(row.get("element", default_element)))
        if key in entries:
            raise ValidationError(f"duplicate oracle entry {key}")
        entries[key] = parse_exact(row["value"])
    return OrbitalOracle(entries, stable)


def _oracle_json(oracle: OrbitalOracle, keyname: str) -> list:
    return [{keyname: k[0], "element": k[1], "value": v.to_json()}
            for k, v in sorted(oracle.entries.items())]


def _parse_galois(obj, rd: RootDatum) -> GaloisModel:
    frob = obj.get("frobenius", "identity")
    frob = parse_w(frob, rd)
    inertia = [parse_w(g, rd) for g in obj.get("inertia", [])]
    return GaloisModel(frob, tuple(inertia))


def scenario_from_json(obj: dict) -> Scenario:
    if obj.get("schema") != SCHEMA:
        raise ValidationError(f"schema must be {SCHEMA!r}, got {obj.get('schema')!r}")
    try:
        rd_raw = obj["root_datum"]
        rd = _parse_root_datum(rd_raw)
        gm = _parse_galois(obj.get("galois", {}), rd)
        rf = obj["residue_field"]
        p, f = int(rf["p"]), int(rf.get("f", 1))
        r = rational(obj["depth_r"])
        points = dict(obj.get("points", {}))
        point = obj.get("point") or (next(iter(points)) if points else None)
        if point is None:
            raise ValidationError("scenario needs at least one point")
        ranks = parse_rank_dict(obj["ranks"]) if "ranks" in obj else None
        gamma = dict(obj.get("gamma", {}))
    except KeyError as exc:
        raise ValidationError(f"missing section {exc.args[0]!r}") from None
    sc = Scenario(
        name=str(obj.get("name", "")),
        rd=rd,
        rd_raw=rd_raw,
        gm=gm,
        p=p,
        f=f,
        r=r,
        points=points,
        point=point,
        gamma_raw=gamma,
        xstar_raw=dict(obj.get("xstar", {})),
        ranks=ranks,
        extras_raw=dict(obj.get("ramified_extras", {})),
        classes_raw=list(obj.get("classes", [])),
        oracles_raw=dict(obj.get("oracles", {})),
        theta_raw=dict(obj.get("theta_values", {})),
        flags={"unramified_split": gm.is_unramified, "maximally_split_levi": gm.is_unramified,
               **obj.get("flags", {})},
        partner_raw=obj.get("stable_partner"),
        element_id=str(gamma.get("element_id", "gamma")),
    )
    return sc


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return scenario_from_json(obj)


def fixtures_dir() -> Path:
    return Path(__file__).with_name("fixtures")


def bundled(name: str) -> Scenario:
    return load_scenario(fixtures_dir() / f"{name}.json")


def bundled_names() -> list:
    return sorted(p.stem for p in fixtures_dir().glob("*.json"))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False)


__all__ = ["Scenario", "scenario_from_json", "load_scenario", "bundled", "bundled_names",
           "parse_w", "dumps", "Exact"]
