"""Command-line driver.

    uniabs analyze prog.u --config cfg.json [--option key=value]...
                  [--interactive] [--format text|json] [--no-color] [--share-url]

Exit status: 0 no alarms, 1 alarms, 2 usage/config/parse error, 3 engine
abort (including interruption).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import share
from .config import ConfigError, OptionError, build_stack, parse_config_file, set_option
from .engine import NullChannel, TerminalChannel, run
from .engine.interactive import run_session
from .frontend import FrontendError, parse, typecheck

USAGE_ERROR = 2
ABORT_ERROR = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniabs",
        description="Abstract interpreter for the Universal toy language.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    analyze = sub.add_parser("analyze", help="analyze a Universal source file")
    analyze.add_argument("file", help="Universal source file (.u)")
    analyze.add_argument("--config", required=True, help="JSON domain configuration")
    analyze.add_argument(
        "--option", action="append", default=[], metavar="KEY=VALUE",
        help="set an analysis option (repeatable)",
    )
    analyze.add_argument("--interactive", action="store_true",
                         help="drive the analysis from the abstract debugger")
    analyze.add_argument("--format", choices=["text", "json"], default=None)
    analyze.add_argument("--no-color", action="store_true")
    analyze.add_argument("--share-url", action="store_true",
                         help="print the share fragment instead of analyzing")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    return _analyze(args)


def _analyze(args) -> int:
    err = sys.stderr
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"uniabs: cannot read {args.file}: {exc}", file=err)
        return USAGE_ERROR

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config_text = fh.read()
    except OSError as exc:
        print(f"uniabs: cannot read {args.config}: {exc}", file=err)
        return USAGE_ERROR

    if args.share_url:
        try:
            fragment = share.encode_share(
                {
                    "language": "universal",
                    "program": source,
                    "config": json.loads(config_text),
                    "options": dict(kv.split("=", 1) for kv in args.option),
                }
            )
        except (ValueError, json.JSONDecodeError) as exc:
            print(f"uniabs: cannot encode share URL: {exc}", file=err)
            return USAGE_ERROR
        print(fragment)
        return 0

    try:
        from .config import parse_config

        stack = build_stack(parse_config(config_text))
    except ConfigError as exc:
        print(f"uniabs: {args.config}: {exc}", file=err)
        return USAGE_ERROR

    for item in args.option:
        if "=" not in item:
            print(f"uniabs: bad --option {item!r}, expected KEY=VALUE", file=err)
            return USAGE_ERROR
        key, value = item.split("=", 1)
        try:
            set_option(stack, key, value)
        except OptionError as exc:
            print(f"uniabs: {exc}", file=err)
            return USAGE_ERROR

    if args.interactive:
        set_option(stack, "engine", "interactive")
    if args.format:
        set_option(stack, "format", args.format)
    if args.no_color or os.environ.get("NO_COLOR"):
        set_option(stack, "no-color", "true")

    try:
        program = typecheck(parse(source, args.file))
    except FrontendError as exc:
        for diag in exc.diagnostics:
            print(str(diag), file=err)
        return USAGE_ERROR

    as_json = stack.options.get("format") == "json"
    io = NullChannel() if as_json else TerminalChannel()
    if stack.options.get("engine") == "interactive":
        report = run_session(program, stack, TerminalChannel() if as_json else io)
    else:
        report = run(program, stack, io)
    if as_json:
        print(report.to_json())
    if report.aborted:
        return ABORT_ERROR
    return 1 if report.alarms else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
