"""Command-line harness: claim verification, series and density exports.

Exit codes: 0 all selected checks pass, 1 a claim failed, 2 usage error.
Outputs are deterministic: identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .claims import run_claims, select_claims
from .engine import get_context, parse_element
from .oracle import build_oracle, compare_multiplication_tables
from .presentation import export_presentation, verify_presentation
from .series import SandwichOnly, SeriesKind, series
from .spectra import DensitySequence, density_sequence, invariant_subspace
from .subgroup import (base_and_centre_subgroup, centre_block_subgroup,
                       full_group, trivial_subgroup)

USAGE_ERROR = 2


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _series_csv(table) -> str:
    lines = ["kind,k,i,log_order,layer_shape,igs"]
    for row in table.to_rows():
        shape = "x".join(str(q) for q in row["layer_shape"]) if row["layer_shape"] else ""
        if row["layer_shape"] is None:
            shape = "nonabelian"
        igs = ";".join(row["igs"])
        lines.append(f"{row['kind']},{row['k']},{row['i']},{row['log_order']},{shape},{igs}")
    return "\n".join(lines) + "\n"


def _series_json(table) -> str:
    return json.dumps(table.to_rows(), indent=2) + "\n"


def cmd_verify(args) -> int:
    selectors = None
    if args.claims:
        selectors = [s for chunk in args.claims for s in chunk.split(",") if s]
    if selectors and args.all:
        print("error: choose either --claims or --all", file=sys.stderr)
        return USAGE_ERROR
    try:
        ids = select_claims(selectors, args.k)
    except KeyError as exc:
        print(f"error: unknown claim selector {exc}", file=sys.stderr)
        return USAGE_ERROR
    results = run_claims(args.k, ids)
    lines = [r.line() for r in results]
    n_fail = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - n_fail}/{len(results)} claims verified at level {args.k}")
    text = "\n".join(lines) + "\n"
    if args.format == "json":
        text = json.dumps(
            [{"claim_id": r.claim_id, "k": r.k, "status": r.status, "details": r.details}
             for r in results],
            indent=2, default=str) + "\n"
    _write(text, args.out)
    return 0 if n_fail == 0 else 1


def cmd_series(args) -> int:
    ctx = get_context(args.k)
    try:
        table = series(ctx, SeriesKind(args.kind))
    except SandwichOnly as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    text = _series_csv(table) if args.format == "csv" else _series_json(table)
    _write(text, args.out)
    return 0


def _load_seed_target(ctx, path: str):
    seeds = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                el = parse_element(ctx, line)
            except ValueError as exc:
                raise ValueError(f"seed file {path}, line {lineno}: {exc}") from None
            if not el.is_central_block():
                raise ValueError(
                    f"seed file {path}, line {lineno}: seed is not in the centre block")
            seeds.append(el)
    return invariant_subspace(ctx, seeds, label=os.path.basename(path))


def cmd_density(args) -> int:
    ctx = get_context(args.k)
    if args.target == "Z":
        target, label = centre_block_subgroup(ctx), "Z"
    elif args.target == "H":
        target, label = base_and_centre_subgroup(ctx), "H"
    elif args.target == "full":
        target, label = full_group(ctx), "full"
    elif args.target == "trivial":
        target, label = trivial_subgroup(ctx), "trivial"
    else:  # seed
        if not args.seed_file:
            print("error: --target seed needs --seed-file PATH", file=sys.stderr)
            return USAGE_ERROR
        try:
            sub = _load_seed_target(ctx, args.seed_file)
        except (OSError, ValueError, RuntimeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return USAGE_ERROR
        target, label = sub.span, sub.label
    try:
        table = series(ctx, SeriesKind(args.kind))
    except SandwichOnly as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    seq: DensitySequence = density_sequence(target, table, target_label=label)
    text = "\n".join(seq.to_csv_lines()) + "\n" if args.format == "csv" else seq.to_json()
    _write(text, args.out)
    return 0


def cmd_export_presentation(args) -> int:
    text = export_presentation(get_context(args.k))
    _write(text, args.out)
    if args.check:
        rep = verify_presentation(text)
        if not rep["ok"]:
            print("error: exported presentation failed self evaluation", file=sys.stderr)
            return 1
    return 0


def cmd_oracle(args) -> int:
    oracle = build_oracle()
    rep = compare_multiplication_tables(get_context(1), oracle)
    census = oracle.order_census()
    lines = [
        f"elements {oracle.order}",
        f"table_equal {str(rep['ok']).lower()} pairs {rep['pairs_checked']}",
        "order_census " + " ".join(f"{o}:{c}" for o, c in sorted(census.items())),
        f"centre_size {len(oracle.centre())}",
    ]
    _write("\n".join(lines) + "\n", args.out)
    return 0 if rep["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wrsp",
        description="exact engine and verification harness for the level-k "
                    "2-group tower")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_k(p, maxk=4):
        p.add_argument("--k", type=int, required=True, metavar="K",
                       help=f"level, 1..{maxk}")
        p.add_argument("--deep", action="store_true",
                       help="allow level 4 (slower)")

    p = sub.add_parser("verify", help="run structure claims")
    add_k(p)
    p.add_argument("--claims", action="append", default=[],
                   help="comma separated claim ids or prefixes")
    p.add_argument("--all", action="store_true", help="run every supported claim")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("series", help="export a filtration series")
    add_k(p)
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in SeriesKind])
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("density", help="export a density sequence")
    add_k(p)
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in SeriesKind])
    p.add_argument("--target", required=True,
                   choices=("Z", "H", "full", "trivial", "seed"))
    p.add_argument("--seed-file", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("export-presentation",
                       help="write the power-commutator presentation")
    add_k(p)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--check", action="store_true",
                   help="re-evaluate every relation in the engine")
    p.set_defaults(func=cmd_export_presentation)

    p = sub.add_parser("oracle", help="level-1 word-reduction cross check")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_ERROR
    k = getattr(args, "k", None)
    if k is not None:
        cap = 4 if getattr(args, "deep", False) else 3
        if not 1 <= k <= cap:
            hint = "" if cap == 4 else " (use --deep for level 4)"
            print(f"error: --k must be in 1..{cap}{hint}", file=sys.stderr)
            return USAGE_ERROR
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
