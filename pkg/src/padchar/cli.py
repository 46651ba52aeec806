"""Command line interface: ``padchar <command> [scenario.json] [flags]``.

Exit codes: 0 success, 1 invalid input, 2 a computed identity failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .charform import (
    eval_char,
    eval_char_terms,
    eval_stable_terms,
    eval_twisted_char,
    stability_check,
    stable_cross_check,
    stable_ranks,
)
from .disc import disc_val_gamma, disc_val_xstar, part_disc_sides
from .elements import centralizer_ids, head_profile
from .errors import MismatchError, PadcharError, ValidationError
from .fuzz import SYSTEMS, default_seed, random_gxf_instance, random_point, random_weyl_element, rng_for
from .arith import Exact, fmt_rational
from .mp import gxf_card_sides, index_product_const, index_product_cor
from .rootgal import weyl_transport
from .scenario import bundled_names, fixtures_dir, load_scenario, parse_w
from .signs import LEVELS, assemble, computed_ranks, stable_sign_sides

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2


def _resolve(path: str) -> Path:
    """A file path, or the name of a bundled fixture."""
    p = Path(path)
    if p.exists() or path.endswith(".json"):
        return p
    if path in bundled_names():
        return fixtures_dir() / f"{path}.json"
    return p


def _load(args):
    return load_scenario(_resolve(args.scenario))


def _table(rows, header) -> str:
    rows = [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out.extend("  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows)
    return "\n".join(out)


def _value(x: Exact) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_signs(args) -> tuple:
    sc = _load(args)
    ctx = sc.context()
    rep = assemble(ctx)
    out = {"scenario": sc.name, "signs": rep.to_json()}
    j = out["signs"]
    rows = [(name,) + tuple(j[name][lev] for lev in LEVELS)
            for name in ("tilde_e", "eps_unram", "eps_nosymm", "eps_noram")]
    print(f"scenario: {sc.name}")
    print(_table(rows, ("sign",) + LEVELS))
    print()
    qrows = [(name, j[name]["G/G'"], j[name]["H/H'"], j[name]["pi'"])
             for name in ("e", "eps_ram", "tilde_e_quot", "eps_noram_quot")]
    print(_table(qrows, ("quotient", "G/G'", "H/H'", "pi'")))
    print()
    contrib = j["unram_terms"]["G"]
    if contrib:
        print("eps_unram contributions on G: "
              + ", ".join(f"{k}: {v}" for k, v in sorted(contrib.items())))
    print(f"composed eps_ram * eps_noram * tilde_e at pi': {j['composed']}")
    status = EXIT_OK
    if ctx.part.gm.is_unramified and sc.flags.get("maximally_split_levi", True):
        ranks = ctx.ranks or computed_ranks(ctx)
        lhs, rhs = stable_sign_sides(ctx, ranks)
        ok = lhs == rhs
        out["stable_sign_identity"] = {"tilde_e": lhs, "rank_parity_times_e": rhs, "holds": ok,
                                       "ranks": ranks}
        print(f"stable-sign identity: tilde_e = {lhs:+d}, rank parity * e = {rhs:+d}"
              f" -> {'ok' if ok else 'MISMATCH'}")
        if not ok:
            status = EXIT_MISMATCH
    return status, out


def cmd_disc(args) -> tuple:
    sc = _load(args)
    ctx = sc.context()
    ap = ctx.approximation
    whole, factored = part_disc_sides(ap)
    head = head_profile(ap)
    out = {
        "scenario": sc.name,
        "v_gamma": fmt_rational(disc_val_gamma(ctx.gamma)),
        "v_head": fmt_rational(disc_val_gamma(head)),
        "v_tail_on_H": fmt_rational(disc_val_gamma(ctx.gamma, ids=centralizer_ids(ap))),
        "v_xstar": fmt_rational(disc_val_xstar(ctx.xstar)),
        "root_H": sorted(centralizer_ids(ap)),
        "factorization_holds": whole == factored,
    }
    print(f"scenario: {sc.name}")
    print(_table([(k, v) for k, v in out.items() if k != "scenario"], ("quantity", "value")))
    return (EXIT_OK if whole == factored else EXIT_MISMATCH), out


def cmd_mp_verify(args) -> tuple:
    seed = default_seed() if args.seed is None else args.seed
    rng = rng_for(seed)
    systems = SYSTEMS if args.system == "all" else (args.system,)
    out = {"seed": seed, "trials": args.trials, "systems": {}}
    status = EXIT_OK
    rows = []
    for name in systems:
        passed, failures = 0, []
        for i in range(args.trials):
            part, pt, f, g, tl = random_gxf_instance(rng, name)
            lhs, rhs = gxf_card_sides(part, pt, f, g, tl)
            if lhs == rhs:
                passed += 1
            else:
                failures.append({"trial": i, "lhs": lhs.to_json(), "rhs": rhs.to_json()})
        out["systems"][name] = {"passed": passed, "failures": failures[:5]}
        rows.append((name, f"{passed}/{args.trials}", "pass" if not failures else "FAIL"))
        if failures:
            status = EXIT_MISMATCH
    if args.scenario:
        sc = _load(args)
        ctx = sc.context()
        try:
            const = index_product_const(ctx)
            cor = index_product_cor(ctx)
            out["index_products"] = {"const": [s.to_json() for s in const],
                                     "cor": [s.to_json() for s in cor]}
            rows.append((f"index products ({sc.name})", "2/2", "pass"))
        except MismatchError as exc:
            out["index_products"] = {"error": str(exc)}
            rows.append((f"index products ({sc.name})", "-", "FAIL"))
            status = EXIT_MISMATCH
    print(f"seed: {seed}")
    print(_table(rows, ("check", "passed", "verdict")))
    return status, out


def cmd_char(args) -> tuple:
    sc = _load(args)
    ctx = sc.context()
    table = sc.class_table()
    theta = sc.char_values()
    out = {"scenario": sc.name}
    if args.stable:
        terms = eval_stable_terms(ctx, table, theta, sc.stable_oracle(), sc.ranks)
        total = Exact()
        rows = []
        for key, (factor, value) in terms.items():
            total = total + value
            rows.append((key, str(factor), _value(value)))
        out["mode"] = "stable"
        out["ranks"] = stable_ranks(ctx, sc.ranks)
        out["terms"] = [{"h_stable": r[0], "sign": r[1], "value": terms[r[0]][1].to_json()} for r in rows]
        print(_table(rows, ("H-stable class", "sign", "term")))
        if sc.orbital_oracle().entries:
            lhs, rhs = stable_cross_check(ctx, table, theta, sc.orbital_oracle(), sc.ranks)
            out["cross_check"] = {"stable": lhs.to_json(), "twisted_times_rank_sign": rhs.to_json(),
                                  "holds": lhs == rhs}
            if lhs != rhs:
                print(f"cross-check against the twisted formula FAILED: {lhs} vs {rhs}")
                out["value"] = total.to_json()
                return EXIT_MISMATCH, out
    else:
        twisted = bool(args.twisted)
        orbital = sc.orbital_oracle()
        terms = eval_char_terms(ctx, table, theta, orbital, sc.element_id, twisted=twisted)
        total = eval_twisted_char(ctx, table, theta, orbital, sc.element_id) if twisted else \
            eval_char(ctx, table, theta, orbital, sc.element_id)
        rows = [(t.class_id, "yes" if t.contributes else "no", t.signs.get("used", ""), _value(t.value))
                for t in terms]
        out["mode"] = "twisted" if twisted else "untwisted"
        out["terms"] = [t.to_json() for t in terms]
        print(_table(rows, ("class", "contains head", "sign", "term")))
    out["value"] = total.to_json()
    print(f"value ({out['mode']}): {_value(total)}")
    return EXIT_OK, out


def _stability_run(sc, ctx, table, theta, so, w, point_map, point_specs):
    res = stability_check(ctx, table, theta, so, w, point_map, point_specs, element_id=sc.element_id)
    entry = res.to_json()
    entry["twist"] = [list(r) for r in w]
    if point_map:
        entry["point_map"] = point_map
    return res, entry


def cmd_stability(args) -> tuple:
    sc = _load(args)
    ctx = sc.context()
    table = sc.class_table()
    theta = sc.char_values()
    so = sc.stable_oracle()
    seed = default_seed() if args.seed is None else args.seed
    rng = rng_for(seed)
    runs = []
    if args.twist is not None:
        runs.append(("--twist", parse_w(args.twist, sc.rd), None, None))
    elif sc.partner_raw is not None:
        pr = sc.partner_raw
        runs.append(("stable_partner", parse_w(pr.get("twist"), sc.rd), pr.get("point_map"),
                     pr.get("points")))
    else:
        runs.append(("identity", parse_w("identity", sc.rd), None, None))
    base_id = table.classes[0].class_id
    for i in range(args.trials):
        w = random_weyl_element(rng, sc.rd)
        tr = weyl_transport(sc.rd, ctx.part.gm, w, source=ctx.part)
        pt = random_point(rng, tr.target, f"z{i}")
        runs.append((f"random {i}", w, {base_id: pt.name}, {pt.name: pt.to_json()}))
    out = {"scenario": sc.name, "seed": seed, "runs": []}
    rows = []
    status = EXIT_OK
    for label, w, pm, specs in runs:
        res, entry = _stability_run(sc, ctx, table, theta, so, w, pm, specs)
        entry["label"] = label
        out["runs"].append(entry)
        rows.append((label, "equal" if res.equal else "DIFFER",
                     {1: "+1", -1: "-1", None: "?"}[res.untwisted_ratio]))
        if not res.equal:
            status = EXIT_MISMATCH
    print(f"scenario: {sc.name}  seed: {seed}")
    print(_table(rows, ("twist", "stable sums", "untwisted ratio")))
    flips = [r[0] for r in rows if r[2] == "-1"]
    out["untwisted_sign_flips"] = flips
    if flips:
        print(f"without the twist the character sum changes sign under: {', '.join(flips)}")
    return status, out


def cmd_validate(args) -> tuple:
    sc = _load(args)
    errs = sc.validate()
    out = {"scenario": sc.name, "valid": not errs, "errors": errs}
    if errs:
        for e in errs:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID, out
    print(f"{sc.name or args.scenario}: valid")
    return EXIT_OK, out


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padchar",
        description="Exact ingredients of positive-depth supercuspidal character formulae.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("scenario", help="scenario JSON file or bundled fixture name")
        p.add_argument("--report", metavar="OUT.json", help="write a JSON report")

    p = sub.add_parser("signs", help="sign and root-of-unity calculus")
    common(p)
    p.set_defaults(func=cmd_signs)

    p = sub.add_parser("disc", help="reduced discriminant valuations")
    common(p)
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("mp-verify", help="randomized Moy-Prasad cardinality checks")
    p.add_argument("scenario", nargs="?", help="optional scenario for the index-product identities")
    p.add_argument("--system", choices=SYSTEMS + ("all",), default="all")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=None, help="default: $PADCHAR_SEED")
    common(p, scenario=False)
    p.set_defaults(func=cmd_mp_verify)

    p = sub.add_parser("char", help="evaluate the character formula")
    common(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--twisted", action="store_true", help="drop eps_noram (twisted induction)")
    mode.add_argument("--stable", action="store_true", help="stable character sum")
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("stability", help="stable sums at stably conjugate elements")
    common(p)
    p.add_argument("--twist", default=None,
                   help="identity | neg | reflection:<root> | JSON integer matrix")
    p.add_argument("--trials", type=int, default=0, help="extra random Weyl twists")
    p.add_argument("--seed", type=int, default=None, help="default: $PADCHAR_SEED")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("validate", help="validate a scenario file")
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def _write_report(path: str, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2, default=str) + "\n", encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 0) is not None and getattr(args, "trials", 0) < 0:
        parser.error("--trials must be non-negative")
    try:
        status, out = args.func(args)
    except ValidationError as exc:
        print(f"padchar: invalid input: {exc}", file=sys.stderr)
        status, out = EXIT_INVALID, {"error": str(exc), "kind": "validation"}
    except MismatchError as exc:
        print(f"padchar: mismatch: {exc}", file=sys.stderr)
        status, out = EXIT_MISMATCH, {"error": str(exc), "kind": "mismatch"}
    except PadcharError as exc:
        print(f"padchar: {exc}", file=sys.stderr)
        status, out = EXIT_INVALID, {"error": str(exc)}
    if args.report:
        out = dict(out, exit_code=status)
        _write_report(args.report, out)
    return status


if __name__ == "__main__":
    sys.exit(main())
