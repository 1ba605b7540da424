"""Command-line front end.

Exit codes for ``verify``: 0 every index holds, 1 some index fails,
2 some index undecided (none failing), 64 usage error, 65 bad cache file,
70 any other library error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import analytic, catalog
from .agm import AGM_CSV_COLUMNS, agm_rows, write_agm_csv
from .errors import CorruptCache, PrimeBoundsError, UnknownInequality
from .prime_core import DEFAULT_PRODUCT_CAP, PrimeTable, build_table, load_cache, save_cache
from .primorial_limit import (
    CONVERGENCE_COLUMNS,
    convergence_table,
    smallest_valid_prime_bound,
    write_convergence_csv,
)
from .rigor import Interval, Verdict

log = logging.getLogger("primebounds")

CACHE_ENV = "PRIMEBOUNDS_CACHE_DIR"
DEFAULT_COUNT = 1_000_000

EXIT_OK, EXIT_FAIL, EXIT_UNDECIDED = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_SOFTWARE = 64, 65, 70


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# table acquisition
# ---------------------------------------------------------------------------

def _cache_path(args, count: int):
    if args.cache:
        return Path(args.cache)
    directory = os.environ.get(CACHE_ENV)
    if directory:
        return Path(directory) / f"primes-{count}.pgt"
    return None


def obtain_table(args, needed: int = 1) -> PrimeTable:
    count = max(args.count or DEFAULT_COUNT, needed)
    path = _cache_path(args, count)
    if path is not None and path.exists():
        table = load_cache(path)
        if table.count >= needed:
            log.info("loaded %d primes from %s", table.count, path)
            return table
        log.info("cache %s holds %d primes, %d needed; rebuilding", path, table.count, needed)
    table = build_table(count)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_cache(table, path)
        log.info("wrote %d primes to %s", table.count, path)
    return table


def _fmt(iv: Interval) -> str:
    return f"[{iv.lo!r}, {iv.hi!r}] (mid {iv.mid:.12g})"


def _entries(args) -> list:
    try:
        return [catalog.get(i) for i in args.ineq]
    except UnknownInequality as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(args, out) -> int:
    entries = _entries(args)
    ranges = []
    for entry in entries:
        a = args.start if args.start is not None else (entry.claimed_from or entry.domain_min)
        b = args.end if args.end is not None else a
        if b < a:
            raise UsageError(f"empty range [{a}, {b}]")
        ranges.append((entry, a, b))
    table = obtain_table(args, max(b + e.lookahead for e, _, b in ranges))
    reports = [
        catalog.verify_range(e.id, a, b, table, workers=args.jobs, product_cap=args.product_cap)
        for e, a, b in ranges
    ]
    if args.format == "csv":
        writer = csv.DictWriter(out, fieldnames=catalog.REPORT_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rep in reports:
            writer.writerows(rep.rows())
    elif args.format == "jsonl":
        for rep in reports:
            rep.to_jsonl(out)
    else:
        for rep in reports:
            print(catalog.summary_line(rep), file=out)
            for run in rep.runs[: args.max_runs]:
                print(f"  [{run.start}, {run.end}] {run.verdict}", file=out)
            if len(rep.runs) > args.max_runs:
                print(f"  ... {len(rep.runs) - args.max_runs} more runs", file=out)
    return exit_code(reports)


def exit_code(reports) -> int:
    if any(r.count(Verdict.FAILS) for r in reports):
        return EXIT_FAIL
    if any(r.count(Verdict.UNDECIDED) for r in reports):
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_crossover(args, out) -> int:
    entries = _entries(args)
    limit = args.limit
    table = obtain_table(args, limit + max(e.lookahead for e in entries))
    results = [catalog.crossover(e.id, limit, table, args.jobs, args.product_cap) for e in entries]
    rows = [
        {
            "id": r.id,
            "domain_min": r.domain_min,
            "search_limit": r.search_limit,
            "stable_from": r.stable_from,
            "last_failure": r.last_failure,
            "undecided": len(r.undecided),
            "claimed_from": catalog.get(r.id).claimed_from,
        }
        for r in results
    ]
    _emit_rows(args, out, rows, list(rows[0]))
    if args.format == "text":
        for row in rows:
            lf = "-" if row["last_failure"] is None else row["last_failure"]
            print(f"{row['id']}: stable_from={row['stable_from']} last_failure={lf} "
                  f"undecided={row['undecided']} claimed_from={row['claimed_from']} "
                  f"searched {row['domain_min']}..{row['search_limit']}", file=out)
    return EXIT_UNDECIDED if any(r.undecided for r in results) else EXIT_OK


def _emit_rows(args, out, rows, fields) -> None:
    if args.format == "csv":
        writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    elif args.format == "jsonl":
        for row in rows:
            out.write(json.dumps(row) + "\n")


def cmd_constant(args, out) -> int:
    rows = []
    if args.name in ("c", "all"):
        c = analytic.constant_c()
        rows.append({"name": "c", "lo": c.lo, "hi": c.hi, "mid": c.mid})
        for coef in (analytic.MANDL_GAP_COEFF, analytic.MANDL_GAP_COEFF_ALT):
            gc = analytic.gap_crossover(coef, args.limit)
            rows.append({
                "name": f"gap_crossover_{coef}",
                "first_holds": gc.first_holds,
                "stable_from": gc.stable_from,
                "search_limit": gc.search_limit,
                "never_crosses": gc.never_crosses,
                "undecided": len(gc.undecided),
            })
    if args.name in ("d", "all"):
        rows.append({"name": "d", "lo": analytic.D_THETA, "hi": analytic.D_THETA, "mid": analytic.D_THETA})
    if args.name in ("gamma", "all"):
        g = analytic.EULER_GAMMA
        rows.append({"name": "gamma", "lo": g.lo, "hi": g.hi, "mid": g.mid})
    if args.name in ("band-threshold", "all"):
        rows.append({"name": "band_threshold", "smallest_valid_p": smallest_valid_prime_bound()})

    if args.format == "text":
        for row in rows:
            name = row["name"]
            if "lo" in row:
                print(f"{name} = {_fmt(Interval(row['lo'], row['hi']))}", file=out)
                if name == "c":
                    inside = abs(row["mid"] - analytic.C_APPROX) <= 5e-3
                    print(f"  approximation {analytic.C_APPROX} within 5e-3: "
                          f"{'yes' if inside else 'no'}", file=out)
            elif name.startswith("gap_crossover"):
                coef = name.rsplit("_", 1)[1]
                if row["first_holds"] is None:
                    why = " (never: coefficient below 1/14)" if row["never_crosses"] else ""
                    print(f"minorant > n^2/14 with coefficient {coef}: no n up to "
                          f"{row['search_limit']}{why}", file=out)
                else:
                    print(f"minorant > n^2/14 with coefficient {coef}: first n = "
                          f"{row['first_holds']}, stable from {row['stable_from']} "
                          f"(searched to {row['search_limit']})", file=out)
            else:
                print(f"band upper form valid for p >= {row['smallest_valid_p']}", file=out)
    elif args.format == "csv":
        fields = sorted({k for row in rows for k in row}, key=lambda k: (k != "name", k))
        writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    else:
        for row in rows:
            out.write(json.dumps(row) + "\n")
    return EXIT_OK


def cmd_limit(args, out) -> int:
    table = obtain_table(args, args.max)
    points = convergence_table(args.max, args.stride, table)
    if args.format == "csv":
        write_convergence_csv(points, out)
    elif args.format == "jsonl":
        for pt in points:
            out.write(json.dumps(dict(zip(CONVERGENCE_COLUMNS, pt.csv_row()))) + "\n")
    else:
        for pt in points:
            inc = {None: "-", True: "yes", False: "no"}[pt.ratio_increased]
            print(f"n={pt.n} p_n={pt.p_n} root={_fmt(pt.primorial_root)} "
                  f"theta/p_n={_fmt(pt.ratio)} increased={inc}", file=out)
    return EXIT_OK


def cmd_agm(args, out) -> int:
    table = obtain_table(args, args.end)
    rows = agm_rows(args.start, args.end, table, args.stride)
    if args.format == "csv":
        write_agm_csv(rows, out)
    elif args.format == "jsonl":
        for row in rows:
            out.write(json.dumps(dict(zip(AGM_CSV_COLUMNS, row))) + "\n")
    else:
        names = ("theta", "agm", "omega_bound", "closed", "Omega")
        for row in rows:
            parts = [f"{name}={_fmt(Interval(row[i], row[i + 1]))}"
                     for name, i in zip(names, (1, 3, 5, 7, 9))]
            print(f"n={row[0]} " + " ".join(parts), file=out)
    return EXIT_OK


def cmd_sieve(args, out) -> int:
    path = _cache_path(args, args.count or DEFAULT_COUNT)
    table = build_table(args.count or DEFAULT_COUNT)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_cache(table, path)
    row = {"count": table.count, "largest": table.largest,
           "sum": table.sum_to(table.count), "cache": str(path) if path else None}
    if args.format == "text":
        print(f"{table.count} primes, largest {table.largest}, sum {row['sum']}"
              + (f", cached at {path}" if path else ""), file=out)
    else:
        _emit_rows(args, out, [row], list(row))
    return EXIT_OK


def cmd_list(args, out) -> int:
    rows = [
        {"id": e.id, "kind": e.kind.value, "domain_min": e.domain_min,
         "claimed_from": e.claimed_from, "description": e.description}
        for e in catalog.REGISTRY.values()
    ]
    if args.format == "text":
        for r in rows:
            print(f"{r['id']:<20} n >= {r['claimed_from']:<5} {r['kind']:<14} {r['description']}",
                  file=out)
    else:
        _emit_rows(args, out, rows, list(rows[0]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--count", type=int, default=None,
                        help=f"primes in the table (default {DEFAULT_COUNT})")
    common.add_argument("--cache", help=f"cache file path (default: ${CACHE_ENV}/primes-N.pgt if set)")
    common.add_argument("--format", choices=("text", "csv", "jsonl"), default="text")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--product-cap", type=int, default=DEFAULT_PRODUCT_CAP,
                        help="largest n compared with exact primorials")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="primebounds", description="Certified checks of explicit prime inequalities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="check inequalities over an index range")
    p.add_argument("--ineq", action="append", required=True)
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="end", type=int)
    p.add_argument("--max-runs", type=int, default=20, help="runs listed per report in text mode")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("crossover", parents=[common], help="find where inequalities start holding")
    p.add_argument("--ineq", action="append", required=True)
    p.add_argument("--limit", type=int, default=DEFAULT_COUNT - 5)
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("constant", parents=[common], help="print constants with enclosures")
    p.add_argument("name", choices=("c", "d", "gamma", "band-threshold", "all"))
    p.add_argument("--limit", type=int, default=100_000, help="search limit for gap crossovers")
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("limit", parents=[common], help="convergence of the primorial root to e")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("agm", parents=[common], help="Omega(n) and the three upper bounds")
    p.add_argument("--from", dest="start", type=int, default=10)
    p.add_argument("--to", dest="end", type=int, default=100)
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_agm)

    p = sub.add_parser("sieve", parents=[common], help="build a prime table and cache it")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("list", parents=[common], help="list catalog entries")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        return args.func(args, out)
    except UsageError as exc:
        print(f"primebounds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorruptCache as exc:
        print(f"primebounds: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PrimeBoundsError as exc:
        print(f"primebounds: {exc}", file=sys.stderr)
        return EXIT_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
