"""Command-line interface.

Exit codes: 0 success, 1 verification or search failure, 2 usage or parse
error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from propus.catalog import (
    FormatError,
    builtin_catalog,
    emit_entry,
    emit_family,
    export_matrix,
    get_entry,
    parse_families,
)
from propus.families import FamilyError, enumerate_pps, validate_pps, verify_pdf
from propus.matrices import (
    NoValidArrangement,
    arrange_for_skew,
    gsa_matrix,
    is_hadamard,
    is_skew_type,
    is_symmetric_matrix,
    propus_matrix,
)
from propus.residues import EvenModulus, is_skew_set
from propus.searcher import ExceptionalRefused, SearchSpec, SearchStats, search_pdf

OK, FAIL, USAGE = 0, 1, 2


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _has_skew_block(family) -> bool:
    return is_skew_set(arrange_for_skew(family)[0])


def _check_family(label, family, matrices=True) -> tuple[bool, str]:
    try:
        report = verify_pdf(family)
    except FamilyError as exc:
        return False, f"FAIL {label} {family.params}: {type(exc).__name__}: {exc}"
    parts = [f"PASS {label} {family.params} lambda={report.lam} symbol=({report.computed_symbol})"]
    ok = True
    if matrices:
        M = propus_matrix(family)
        if is_hadamard(M) and is_symmetric_matrix(M):
            parts.append(f"symmetric Hadamard of order {M.shape[0]}")
        else:
            ok = False
            parts[0] = parts[0].replace("PASS", "FAIL", 1)
            parts.append(f"propus array of order {M.shape[0]} is not a symmetric Hadamard matrix")
        if _has_skew_block(family):
            G = gsa_matrix(family)
            if is_hadamard(G) and is_skew_type(G):
                parts.append(f"skew Hadamard of order {G.shape[0]} (GS array)")
            else:
                ok = False
                parts[0] = parts[0].replace("PASS", "FAIL", 1)
                parts.append("GS array with skew block is not skew Hadamard")
    return ok, "; ".join(parts)


def cmd_verify(args) -> int:
    status = OK
    loaded = []
    for name in args.files:
        try:
            text = Path(name).read_text(encoding="ascii")
            records = parse_families(text)
        except (OSError, UnicodeDecodeError) as exc:
            print(f"error: {name}: {exc}", file=sys.stderr)
            return USAGE
        except FormatError as exc:
            print(f"error: {name}: {exc}", file=sys.stderr)
            return USAGE
        loaded.append((name, records))
    for name, records in loaded:
        for n, (meta, family) in enumerate(records, 1):
            label = meta.get("id") or (name if len(records) == 1 else f"{name}#{n}")
            ok, line = _check_family(label, family, matrices=not args.no_matrix)
            print(line)
            if not ok:
                status = FAIL
    return status


def cmd_pps(args) -> int:
    try:
        sets = enumerate_pps(args.v, dedupe_multisets=args.dedupe)
    except EvenModulus as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    for pps in sets:
        if args.machine:
            print(pps)
        else:
            print(f"{pps}{' [exceptional]' if pps.is_exceptional else ''}")
    return OK


def _load_one(path: str, entry_id: str | None):
    records = parse_families(Path(path).read_text(encoding="ascii"))
    if entry_id is None:
        if len(records) != 1:
            raise FormatError(f"{path} holds {len(records)} families; choose one with --entry")
        return records[0][1]
    for meta, family in records:
        if meta.get("id") == entry_id:
            return family
    raise FormatError(f"no family with id {entry_id!r} in {path}")


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def cmd_build(args) -> int:
    try:
        family = _load_one(args.file, args.entry)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    try:
        verify_pdf(family)
    except FamilyError as exc:
        print(f"error: not a verified family: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAIL
    if args.array == "propus":
        try:
            M = propus_matrix(family)
        except NoValidArrangement as exc:
            print(f"error: {exc}", file=sys.stderr)
            return FAIL
    else:
        M = gsa_matrix(family, skew_first=True)
    had, sym, skew = is_hadamard(M), is_symmetric_matrix(M), is_skew_type(M)
    print(f"order {M.shape[0]}: hadamard={_yn(had)} symmetric={_yn(sym)} skew-type={_yn(skew)}",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)
    if args.array == "propus":
        ok = had and sym
    else:
        ok = had and (skew or not _has_skew_block(family))
    if args.out is not None:
        _write_text(export_matrix(M), args.out)
    return OK if ok else FAIL


def _parse_sizes(text: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("expected four comma-separated block sizes")
    return tuple(int(p) for p in parts)


def cmd_search(args) -> int:
    try:
        ks = _parse_sizes(args.pps)
        pps = validate_pps(args.v, *ks)
        spec = SearchSpec(
            pps,
            symbol=args.symbol,
            limit=args.limit,
            seed=args.seed,
            effort=args.effort,
            reduce=not args.no_reduce,
            allow_exceptional=args.allow_exceptional,
            node_budget=args.node_budget,
        )
    except ExceptionalRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return USAGE
    except (ValueError, FamilyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    if args.limit == 0:
        return OK

    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    stats = SearchStats()
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="ascii", newline="\n")
    try:
        for n, family in enumerate(search_pdf(spec, jobs=jobs, stats=stats), 1):
            if n > 1:
                out.write("\n")
            out.write(emit_family(family, {"id": f"search-v{pps.v}-{n}"}))
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    print(
        f"{pps} ({spec.symbol}): {stats.emitted} found; "
        f"X1 candidates {stats.first_candidates}, X4 candidates {stats.fourth_candidates}, "
        f"pairs {stats.pairs}, psd pass {stats.psd_pass}, parity pass {stats.parity_pass}"
        + (" [truncated]" if stats.truncated else ""),
        file=sys.stderr,
    )
    return OK if stats.emitted else FAIL


def cmd_catalog(args) -> int:
    if args.action == "list":
        for e in builtin_catalog():
            tag = f"  {e.series_tag}" if e.series_tag else ""
            print(f"{e.id}\t{e.family.params}\t({e.family.symbol}){tag}")
        return OK
    if args.action == "verify-all":
        status = OK
        for e in builtin_catalog():
            ok, line = _check_family(e.id, e.family)
            print(line)
            if not ok:
                status = FAIL
        return status
    if not args.id:
        print("error: catalog emit needs an entry id", file=sys.stderr)
        return USAGE
    try:
        entry = get_entry(args.id)
    except KeyError:
        print(f"error: unknown catalog id {args.id!r}", file=sys.stderr)
        return USAGE
    sys.stdout.write(emit_entry(entry))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="propus",
        description="Verify, build and search propus difference families over Z_v.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log search progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify family files")
    p.add_argument("files", nargs="+")
    p.add_argument("--no-matrix", action="store_true", help="skip the Hadamard matrix checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pps", help="list normalized propus parameter sets")
    p.add_argument("v", type=int)
    p.add_argument("--dedupe", action="store_true", help="merge sets with equal size multisets")
    p.add_argument("--machine", action="store_true", help="print bare (v;k1,k2,k3,k4;lambda) tuples")
    p.set_defaults(func=cmd_pps)

    p = sub.add_parser("build", help="build a Hadamard matrix from a family file")
    p.add_argument("file")
    p.add_argument("--entry", help="id of the record to use in a multi-record file")
    p.add_argument("--array", choices=("propus", "gs"), default="propus")
    p.add_argument("--out", help="output path for the pm matrix ('-' for stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="search for propus difference families")
    p.add_argument("v", type=int)
    p.add_argument("--pps", required=True, help="block sizes k1,k2,k3,k4")
    p.add_argument("--symbol", default="s**")
    p.add_argument("--limit", type=int, default=1)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--effort", type=int, default=None, help="candidate cap per stage")
    p.add_argument("--node-budget", type=int, default=None, help="backtracking nodes per completion")
    p.add_argument("--no-reduce", action="store_true", help="disable multiplier reduction of X1")
    p.add_argument("--allow-exceptional", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("catalog", help="inspect the built-in catalog")
    p.add_argument("action", choices=("list", "verify-all", "emit"))
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
