"""Command-line entry point.

    busecoarse run config.json          # config from a file ("-" for stdin)
    busecoarse net --space halfline --window '{"start":0,"stop":10,"step":1}' --epsilon 1.5

Flag values are parsed as JSON when possible and kept as strings otherwise;
a flag with no value means true.  Reports go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import BusecoarseError
from .runner import COMMANDS, exit_code, run


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_flags(tokens: list[str]) -> dict:
    """Turn ``--key value`` / ``--key=value`` / ``--flag`` tokens into a dict."""
    out: dict = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or tok == "--":
            raise ValueError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
            value = _value(raw)
            i += 1
        elif i + 1 < len(tokens) and not (tokens[i + 1].startswith("--") and len(tokens[i + 1]) > 2):
            value = _value(tokens[i + 1])
            i += 2
        else:
            value = True
            i += 1
        out[key.replace("-", "_")] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="busecoarse",
        description="Run geometry checks on Busemann spaces and print JSON reports.",
        epilog="commands: run, " + ", ".join(COMMANDS),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--indent", type=int, default=None, help="pretty-print the report")
    parser.add_argument("command", help="'run' or one of the command names")
    parser.add_argument("args", nargs=argparse.REMAINDER, help="config path for 'run', flags otherwise")
    return parser


def _load_config(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "run":
            if len(ns.args) != 1:
                parser.error("run takes exactly one config path")
            config = _load_config(ns.args[0])
        elif ns.command in COMMANDS:
            flags = parse_flags(ns.args)
            if "indent" in flags:
                ns.indent = flags.pop("indent")
            config = {"command": ns.command, **flags}
        else:
            parser.error(f"unknown command {ns.command!r}")
    except (OSError, ValueError) as exc:
        print(f"busecoarse: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(config)
    except (BusecoarseError, KeyError, TypeError) as exc:
        print(f"busecoarse: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code(error=exc)
    print(json.dumps(report, sort_keys=True, indent=ns.indent))
    code = exit_code(report)
    if code:
        print(f"busecoarse: verdict {report['verdict']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
