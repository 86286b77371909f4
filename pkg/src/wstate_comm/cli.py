"""Command-line entry point: ``wstate-comm <command> [flags]``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import codebooks
from .efficiency import audit_transcript, eta1, eta2, format_percent, live_proposed_rows, comparison_report
from .errors import DomainError, IntegrityError
from .protocol import EveKind, EveStrategy, Mode, ProtocolConfig, QKDResult, run
from .scheme_search import SearchSpec, search_schemes


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _threshold(text: str) -> float:
    value = float(text)
    if not 0 <= value < 1:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1)")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="master seed for all randomness (default 0)")

    parser = argparse.ArgumentParser(prog="wstate-comm", description="W-state secure quantum communication toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-tables", parents=[common], help="check every codebook row and Gram matrix")
    p.add_argument("--codebook", choices=codebooks.CODEBOOK_NAMES, action="append",
                   help="restrict to one codebook (repeatable)")
    p.add_argument("--export", type=Path, help="write the validated codebooks as JSON to this file")
    p.set_defaults(handler=cmd_verify_tables, subparser=p)

    p = sub.add_parser("simulate", parents=[common], help="run one protocol session")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="dsqc")
    p.add_argument("--codebook", choices=codebooks.CODEBOOK_NAMES, default="W3_FULL")
    p.add_argument("--blocks", type=_positive, default=4)
    p.add_argument("--eve", choices=[k.value for k in EveKind], default="none")
    p.add_argument("--threshold", type=_threshold, default=0.05)
    p.add_argument("--transport", choices=["dsqc", "qsdc"], default="dsqc", help="carrier protocol in qkd mode")
    p.add_argument("--message", help="bit string to send (random if omitted; not allowed in qkd mode)")
    p.add_argument("--out", type=Path, default=Path("transcript.json"), help="transcript file")
    p.add_argument("--expect-delivery", action="store_true",
                   help="exit 1 unless the message is delivered intact")
    p.set_defaults(handler=cmd_simulate, subparser=p)

    p = sub.add_parser("enumerate-schemes", parents=[common], help="search Pauli encoding schemes")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--targets", type=int, nargs="+")
    p.set_defaults(handler=cmd_enumerate_schemes, subparser=p)

    p = sub.add_parser("efficiency-report", parents=[common], help="qubit-efficiency comparison table")
    p.add_argument("--live", action="store_true", help="also print efficiencies audited from fresh simulations")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(handler=cmd_efficiency_report, subparser=p)
    return parser


def cmd_verify_tables(args, parser: argparse.ArgumentParser) -> int:
    names = args.codebook or list(codebooks.CODEBOOK_NAMES)
    rows_ok = rows_total = gram_ok = 0
    exported = []
    for name in names:
        checks = codebooks.check_rows(name, codebooks.TABLES)
        for c in checks:
            status = "PASS" if c.ok else "FAIL"
            print(f"{name} row {c.row:2d} bits={c.bits} {c.operator:<14} {status}" + (f"  {c.detail}" if c.detail else ""))
        rows_total += len(checks)
        rows_ok += sum(c.ok for c in checks)
        try:
            book = codebooks.build_codebook(name, codebooks.TABLES)
        except IntegrityError as exc:
            print(f"{name} gram FAIL  {exc}")
            continue
        ok, detail = codebooks.check_orthogonality(book)
        print(f"{name} gram {len(book)}x{len(book)} {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else ""))
        gram_ok += ok
        exported.append(book.to_dict())
    print(f"summary: {rows_ok}/{rows_total} rows PASS, {gram_ok}/{len(names)} gram matrices PASS")
    if args.export:
        args.export.write_text(json.dumps({"codebooks": exported}, indent=2, sort_keys=True) + "\n")
    return 0 if rows_ok == rows_total and gram_ok == len(names) else 1


def _hex(bits: str) -> str:
    return format(int(bits, 2), f"0{(len(bits) + 3) // 4}x")


def cmd_simulate(args, parser: argparse.ArgumentParser) -> int:
    mode = Mode(args.mode)
    if mode is Mode.QKD and args.message is not None:
        parser.error("--message cannot be combined with --mode qkd")
    try:
        config = ProtocolConfig.from_seed(
            args.seed, mode=mode, codebook=args.codebook, blocks=args.blocks,
            error_threshold=args.threshold, transport=Mode(args.transport),
        )
        result = run(config, args.message, EveStrategy(EveKind(args.eve)))
    except DomainError as exc:
        parser.error(str(exc))
    qkd = isinstance(result, QKDResult)
    transcript = result.transcript if qkd else result
    args.out.write_text(transcript.to_json())

    fields = [
        f"mode={transcript.mode}",
        f"codebook={transcript.codebook}",
        f"blocks={transcript.N}",
        f"eve={args.eve}",
        f"aborted={str(transcript.aborted).lower()}",
        f"match={str(transcript.delivered).lower()}",
        f"decoy_error_rate={transcript.decoy_error_rate:.4f}",
    ]
    if transcript.aborted:
        fields += [f"aborted_at_round={transcript.aborted_at_round}", "eta1=n/a", "eta2=n/a"]
    else:
        d = audit_transcript(transcript)
        fields += [f"eta1={format_percent(eta1(d))}%", f"eta2={format_percent(eta2(d))}%"]
    if transcript.corrupted_blocks:
        fields.append("corrupted_blocks=" + ",".join(map(str, transcript.corrupted_blocks)))
    print(" ".join(fields))
    if qkd:
        print(f"alice_key={_hex(result.alice_key)}")
        print(f"bob_key={_hex(result.bob_key) if result.bob_key and '?' not in result.bob_key else 'none'}")
    if args.expect_delivery and not transcript.delivered:
        return 1
    return 0


def cmd_enumerate_schemes(args, parser: argparse.ArgumentParser) -> int:
    try:
        spec = SearchSpec(args.n, args.m, tuple(args.targets) if args.targets else None, args.size)
    except DomainError as exc:
        parser.error(str(exc))
    result = search_schemes(spec)
    doc = result.to_dict()
    known = {}
    for name in codebooks.CODEBOOK_NAMES:
        book = codebooks.load_codebook(name)
        if book.n == spec.n and book.targets == spec.targets and len(book) == spec.required_set_size:
            if codebooks.operator_set(book) in result.operator_sets:
                known[name] = result.operator_sets.index(codebooks.operator_set(book))
    doc["known_codebooks"] = known
    print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
    return 0


def cmd_efficiency_report(args, parser: argparse.ArgumentParser) -> int:
    report = comparison_report(seed=args.seed)
    live = live_proposed_rows(seed=args.seed) if args.live else None
    if args.format == "json":
        doc = report.to_dict()
        if live is not None:
            doc["live"] = {
                name: [{"codebook": b, "eta1": str(e1), "eta2": str(e2)} for b, e1, e2 in rows]
                for name, rows in live.items()
            }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    sys.stdout.write(report.to_text())
    if live is not None:
        print()
        for name, rows in live.items():
            for book, e1, e2 in rows:
                stored = report.row(name)
                same = "equal" if (e1, e2) == (stored.eta1, stored.eta2) else "DIFFERENT"
                print(f"live {name} {book}: eta1={e1} ({format_percent(e1, trim=True)}%) "
                      f"eta2={e2} ({format_percent(e2, trim=True)}%) {same}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.handler(args, args.subparser)


if __name__ == "__main__":
    sys.exit(main())
