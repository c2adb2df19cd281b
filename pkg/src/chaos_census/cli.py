"""Command-line entry point: ``chaos-census <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .canon import (
    collection_code,
    eclass_size,
    ground_rearrangement_count,
    is_standard,
)
from .chaos import (
    ChaosCoefficients,
    dl_gl_estimates,
    moment_combinatorial,
    moment_direct,
    norm_p,
    random_coefficients,
)
from .covering import (
    SetCollection,
    connected_components,
    is_double_covering,
    is_even_covering,
    to_multigraph,
)
from .enumeration import (
    DEFAULT_WORK_LIMIT,
    Filter,
    Mode,
    MuTable,
    count_labeled,
    default_cache_path,
    enumerate_filtered,
    mu,
    parse_dot,
    theorem_p0_report,
    to_dot,
)
from .errors import CensusError, SizeLimitExceeded
from .partitions import nu, partition_rows
from .verify import DEFAULT_SEED, SUITES, connected_monotonicity, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

log = logging.getLogger("chaos_census")


def parse_range(text: str) -> list[int]:
    """``"5"``, ``"2..7"`` (inclusive) or ``"2,4,6"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def _range_arg(text: str) -> list[int]:
    try:
        return parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _provenance(args) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "work_limit": args.work_limit,
        "threads": args.threads,
    }


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, int) and not isinstance(obj, bool) and abs(obj) >= 2**53:
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit_json(payload: dict, args) -> None:
    payload = {"provenance": _provenance(args), **payload}
    print(json.dumps(_jsonable(payload), indent=2))


def _open_cache(args) -> MuTable | None:
    if args.no_cache:
        return None
    path = Path(args.cache) if args.cache else default_cache_path()
    return MuTable.load(path)


def cmd_nu(args) -> int:
    rows = partition_rows(args.n)
    w = csv.writer(sys.stdout)
    w.writerow(["n", "nu", "asymptotic", "ratio"])
    for n, v, asym, ratio in rows:
        w.writerow([n, v, repr(asym), repr(ratio)])
    return EXIT_OK


def cmd_mu(args) -> int:
    table = _open_cache(args)
    kw = {"workers": args.threads, "work_limit": args.work_limit}
    rows = []
    ok = True
    for p in args.p:
        value = mu(args.l, p, args.mode, args.filter, table, **kw)
        row = {"l": args.l, "p": p, "mode": args.mode, "filter": args.filter, "value": value}
        if args.check_b1:
            if args.l != 2:
                print("--check-b1 applies to l = 2 only", file=sys.stderr)
                return EXIT_USAGE
            row["nu_diff"] = nu(p) - nu(p - 1)
            row["b1_holds"] = value == row["nu_diff"]
            ok = ok and row["b1_holds"]
        rows.append(row)
    if table is not None and table.dirty:
        table.save()
    if args.format == "json":
        _emit_json({"rows": [{**r, "value": str(r["value"])} for r in rows]}, args)
    elif args.format == "csv":
        w = csv.writer(sys.stdout)
        keys = list(rows[0])
        w.writerow(keys)
        for r in rows:
            w.writerow([r[k] for k in keys])
    else:
        for r in rows:
            extra = f"  nu(p)-nu(p-1)={r['nu_diff']}  {'ok' if r['b1_holds'] else 'MISMATCH'}" if args.check_b1 else ""
            print(f"mu_{r['l']},{r['p']}({r['mode']}, {r['filter']}) = {r['value']}{extra}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_enumerate(args) -> int:
    reps = enumerate_filtered(args.l, args.p, args.mode, args.filter, workers=args.threads, work_limit=args.work_limit)
    if args.dot:
        out = Path(args.dot)
        out.mkdir(parents=True, exist_ok=True)
        for k, r in enumerate(reps):
            (out / f"class_{k:04d}.dot").write_text(to_dot(r.graph, f"class_{k}"))
    items = [{"code": r.code.hex(), "collection": [list(m) for m in r.collection.members]} for r in reps]
    if args.format == "json":
        _emit_json({"l": args.l, "p": args.p, "mode": args.mode, "filter": args.filter, "classes": items}, args)
    else:
        print(f"# {len(items)} classes (l={args.l}, p={args.p}, {args.mode}, {args.filter})")
        for it in items:
            print(f"{it['code']}  {json.dumps(it['collection'])}")
    return EXIT_OK


def _read_input(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def cmd_inspect(args) -> int:
    text = _read_input(args.file)
    if text.lstrip().startswith("graph") or args.file.endswith(".dot"):
        from .covering import from_multigraph

        c = from_multigraph(parse_dot(text))
    else:
        c = SetCollection.from_json(text)
    info: dict = {
        "collection": [list(m) for m in c.members],
        "p": c.p,
        "double_covering": is_double_covering(c),
        "even_covering": is_even_covering(c),
        "components": len(connected_components(c)),
        "standard": is_standard(c),
        "code": collection_code(c).hex(),
    }
    if info["double_covering"]:
        n = args.ground or len(c.ground)
        aut = ground_rearrangement_count(c, n)
        info.update(
            degrees=list(to_multigraph(c).degrees()),
            vertex_aut=aut.vertex_aut,
            ground_aut=aut.ground_aut,
            ground_size=n,
            eclass_size=eclass_size(c, n),
        )
    if args.format == "json":
        _emit_json(info, args)
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
    return EXIT_OK


def cmd_moment(args) -> int:
    b = ChaosCoefficients.from_json(_read_input(args.coeffs))
    out = {"l": b.l, "p": args.exponent, "norm_sq": b.norm_sq}
    if args.exponent % 2 == 0:
        out["moment_combinatorial"] = moment_combinatorial(b, args.exponent)
    out["moment_direct"] = moment_direct(b, args.exponent)
    out["norm_p"] = norm_p(b, args.exponent)
    ok = out.get("moment_combinatorial", out["moment_direct"]) == out["moment_direct"]
    out["routes_agree"] = ok
    if args.format == "json":
        _emit_json(out, args)
    else:
        for k, v in out.items():
            print(f"{k}: {v}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    names = args.suite or ["all"]
    unknown = [n for n in names if n != "all" and n not in SUITES]
    if unknown:
        print(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    results = run_suites(names, seed=args.seed, trials=args.trials)
    if args.format == "json":
        _emit_json({"suites": [r.as_dict() for r in results]}, args)
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status}  {r.name:15s} checks={r.checked} failures={len(r.failures)}")
            for msg in r.failures[:5]:
                print(f"      {msg}")
        total_fail = sum(not r.passed for r in results)
        print(f"{len(results) - total_fail}/{len(results)} suites passed (seed {args.seed})")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


EXPERIMENT_CELLS = {2: list(range(2, 8)), 3: [2, 4, 6], 4: [2, 3, 4]}


def experiments_report(seed: int = DEFAULT_SEED) -> dict:
    import random

    label = "observation, not assertion"
    mono = []
    mu_full: dict[int, dict[int, int]] = {}
    limits = []
    for l, ps in EXPERIMENT_CELLS.items():
        cells = [p for p in ps if (l * p) % 2 == 0]
        mu_full[l] = {p: mu(l, p, Mode.EXACT, Filter.FULL) for p in cells}
        conn = {p: mu(l, p, Mode.EXACT, Filter.CONNECTED) for p in cells}
        for q, p in zip(cells, cells[1:]):
            mono.append(
                {
                    "l": l,
                    "q": q,
                    "p": p,
                    "mu_full_q_le_p": mu_full[l][q] <= mu_full[l][p],
                    "mu_connected_q_le_p": conn[q] <= conn[p],
                    "label": label,
                }
            )
        for row in connected_monotonicity(l, cells):
            row.update(l=l, label=label)
            mono.append(row)
        for p in cells:
            labeled = count_labeled(l, p, Mode.EXACT)
            limits.append(
                {
                    "l": l,
                    "p": p,
                    "classes_ratio": mu_full[l][p] ** (1 / p) / p ** (l / 2 - 1),
                    "labeled_ratio": labeled ** (1 / p) / p ** (l - 1),
                    "label": label,
                }
            )
    rng = random.Random(seed)
    probes = [(2, p, ChaosCoefficients.uniform(2, m)) for p in (4, 6) for m in range(4, 11)]
    probes += [(2, p, random_coefficients(rng, 2, 6)) for p in (4, 6) for _ in range(5)]
    estimates = dl_gl_estimates(mu_full, probes)
    p0 = {l: theorem_p0_report(l, ps) for l, ps in EXPERIMENT_CELLS.items()}
    return {
        "seed": seed,
        "monotonicity": mono,
        "d_g_estimates": estimates,
        "limit_ratios": limits,
        "p0_fits": {l: {"a_fit": r["a_fit"], "b_fit": r["b_fit"], "label": label} for l, r in p0.items()},
        "label": label,
    }


def cmd_experiments(args) -> int:
    report = experiments_report(args.seed)
    if args.format == "json":
        _emit_json(report, args)
        return EXIT_OK
    print("# every row below is an observation, not an assertion")
    print("## monotonicity")
    for row in report["monotonicity"]:
        print("  " + ", ".join(f"{k}={v}" for k, v in row.items() if k != "label"))
    print("## d(l), g(l) finite-range estimates")
    for l, v in report["d_g_estimates"]["d_estimate"].items():
        print(f"  d({l}) >= {v:.6f}")
    for l, v in report["d_g_estimates"]["g_estimate"].items():
        print(f"  g({l}) >= {v:.6f}")
    print("## limit ratios")
    for row in report["limit_ratios"]:
        print(f"  l={row['l']} p={row['p']} classes={row['classes_ratio']:.6f} labeled={row['labeled_ratio']:.6f}")
    print("## fitted P0 constants")
    for l, r in report["p0_fits"].items():
        print(f"  l={l}: a={r['a_fit']:.6f} b={r['b_fit']:.6f}")
    return EXIT_OK


def cmd_cache(args) -> int:
    path = Path(args.cache) if args.cache else default_cache_path()
    if args.action == "clear":
        if path.exists():
            path.unlink()
        print(f"cleared {path}")
        return EXIT_OK
    table = MuTable.load(path)
    if args.action == "verify":
        ok = not table.dirty
        print(f"{path}: {'ok' if ok else 'corrupt (will be recomputed)'} ({len(table.entries)} entries)")
        return EXIT_OK if ok else EXIT_FAIL
    for row in table.rows():
        print(json.dumps(row))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes for enumeration")
    common.add_argument("--work-limit", type=int, default=DEFAULT_WORK_LIMIT)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--cache", help="mu cache path (default $CHAOS_CENSUS_CACHE or ./mu-cache.json)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="chaos-census", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nu", parents=[common], help="partition numbers and the asymptotic as CSV")
    s.add_argument("--n", type=_range_arg, required=True)
    s.set_defaults(func=cmd_nu)

    for name, func, help_ in [
        ("mu", cmd_mu, "count isomorphism classes"),
        ("enumerate", cmd_enumerate, "list canonical representatives"),
    ]:
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--l", type=int, required=True)
        if name == "mu":
            s.add_argument("--p", type=_range_arg, required=True)
            s.add_argument("--check-b1", action="store_true")
        else:
            s.add_argument("--p", type=int, required=True)
            s.add_argument("--dot", metavar="DIR", help="write one DOT file per class")
        s.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
        s.add_argument("--filter", choices=[f.value for f in Filter], default="full")
        s.set_defaults(func=func)

    s = sub.add_parser("inspect", parents=[common], help="describe a collection (JSON) or DOT multigraph")
    s.add_argument("file", help="path or - for stdin")
    s.add_argument("--ground", type=int, help="ground size for symmetry counts")
    s.set_defaults(func=cmd_inspect)

    s = sub.add_parser("moment", parents=[common], help="exact moment of a chaos sum")
    s.add_argument("--coeffs", required=True, help="coefficient JSON file or -")
    s.add_argument("--exponent", type=int, required=True)
    s.set_defaults(func=cmd_moment)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("--suite", action="append", help=f"one of: all, {', '.join(SUITES)} (repeatable)")
    s.add_argument("--trials", type=int)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("experiments", parents=[common], help="observational reports on open questions")
    s.set_defaults(func=cmd_experiments)

    s = sub.add_parser("cache", parents=[common], help="inspect or clear the mu cache")
    s.add_argument("action", choices=["show", "verify", "clear"])
    s.set_defaults(func=cmd_cache)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except SizeLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (CensusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
