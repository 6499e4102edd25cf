"""``supercartan`` command line: ``parse``, ``run`` and ``render`` subcommands."""

from __future__ import annotations

import argparse
import json
import sys

from .grammar import BUILTIN_SUITES, SpecError, parse_spec, render_spec
from .runner import EXIT_PASS, EXIT_STRUCTURAL, run_checks


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.buffer.read().decode("utf-8")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _source(args) -> str:
    if getattr(args, "suite", None):
        return "".join(f"check {s}\n" for s in args.suite)
    return _read(args.input)


def _report_error(exc: Exception, fmt: str) -> int:
    if fmt == "json":
        sys.stdout.write(json.dumps({"checks": [], "exit": EXIT_STRUCTURAL, "error": str(exc)}, indent=2) + "\n")
    else:
        sys.stderr.write(f"error: {exc}\n")
    return EXIT_STRUCTURAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supercartan", description="Exact checks for Cartan (super)geometry documents.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("parse", "syntax and reference check only"),
        ("run", "execute the document's checks"),
        ("render", "print the canonical form of a document"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", nargs="?", default="-", help="document path, or - for standard input")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if name == "run":
            sp.add_argument("--suite", action="append", choices=BUILTIN_SUITES, help="run a built-in suite instead of a document")
            sp.add_argument("-j", "--jobs", type=int, default=1, help="checks run in parallel")
            sp.add_argument("--timeout", type=float, default=None, help="per-check timeout in seconds")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _source(args)
        doc = parse_spec(text)
    except (SpecError, OSError, UnicodeDecodeError) as exc:
        return _report_error(exc, args.format)
    if args.command == "parse":
        if args.format == "json":
            sys.stdout.write(json.dumps({"statements": len(doc), "exit": EXIT_PASS}) + "\n")
        else:
            sys.stdout.write(f"ok: {len(doc)} statements\n")
        return EXIT_PASS
    if args.command == "render":
        sys.stdout.write(render_spec(doc))
        return EXIT_PASS
    report = run_checks(doc, jobs=args.jobs, timeout=args.timeout)
    sys.stdout.write(report.render_json() if args.format == "json" else report.render_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
