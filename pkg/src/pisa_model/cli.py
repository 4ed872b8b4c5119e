"""Command line front-end: ``run``, ``report`` and ``validate``.

Exit codes: 0 success (per-packet drops are data), 1 invalid spec or
unreadable file, 2 malformed trace.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cost import pipeline_report, render_text, sweep_csv
from .pipeline import Pipeline
from .spec import SpecError, load_pipeline_spec_file
from .trace import TraceError, format_trace, parse_trace, read_pcap


def _load(path: str):
    try:
        return load_pipeline_spec_file(path)
    except SpecError as exc:
        for line in exc.diagnostics:
            print(f"error: {line}", file=sys.stderr)
        return None


def _write(text: str, dest: str | None) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def cmd_run(args) -> int:
    spec = _load(args.spec)
    if spec is None:
        return 1
    try:
        if args.trace.endswith((".pcap", ".cap")):
            records = read_pcap(args.trace)
        else:
            records = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read trace {args.trace}: {exc.strerror}", file=sys.stderr)
        return 1
    except TraceError as exc:
        print(f"error: malformed trace: {exc}", file=sys.stderr)
        return 2
    inputs = [r for r in records if r.direction == "in"]
    result = Pipeline(spec, seed=args.seed).run(inputs)
    _write(format_trace(result.outputs), args.out)
    stats = json.dumps(result.stats, indent=2, sort_keys=True) + "\n"
    if args.stats:
        _write(stats, args.stats)
    elif args.out not in (None, "-"):
        sys.stdout.write(stats)
    return 0


def cmd_report(args) -> int:
    spec = _load(args.spec)
    if spec is None:
        return 1
    if args.sweep_bus:
        _write(sweep_csv(spec.platform), args.out)
        return 0
    report = pipeline_report(spec)
    _write(report.to_json() if args.json else render_text(report), args.out)
    return 0


def cmd_validate(args) -> int:
    spec = _load(args.spec)
    if spec is None:
        return 1
    print(f"{args.spec}: ok ({len(spec.headers)} headers, {len(spec.tables)} tables)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pisa-model", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a packet trace through a pipeline spec")
    run.add_argument("spec")
    run.add_argument("trace", help="hex trace file, or .pcap")
    run.add_argument("--out", help="output trace file (default: stdout)")
    run.add_argument("--stats", help="write run statistics JSON here")
    run.add_argument("--seed", type=int, default=None, help="override the spec's hash seed")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="print the FPGA cost report for a spec")
    rep.add_argument("spec")
    fmt = rep.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="machine-readable JSON")
    fmt.add_argument("--text", action="store_true", help="aligned text (default)")
    rep.add_argument("--sweep-bus", action="store_true", help="emit the bus-width sweep CSV")
    rep.add_argument("--out", help="write to a file instead of stdout")
    rep.set_defaults(func=cmd_report)

    val = sub.add_parser("validate", help="load and validate a spec")
    val.add_argument("spec")
    val.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
