"""Command-line front end.

Exit codes are a stable contract:

    0  clean (validate: no findings; simulate: every line passed)
    1  warnings only (validate)
    2  validation errors (or warnings with --fail-on-warning)
    3  parse error in a model or script file
    4  I/O error
    5  simulate: a command or assertion failed
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .parser import ParseFailure, model_to_dot, parse_model, render_model, report_to_json
from .runtime import world_to_json
from .script import ScriptError, ScriptRunner, parse_script
from .validator import Severity, ValidationReport, missing_r2_grants, validate

EXIT_CLEAN = 0
EXIT_WARNINGS = 1
EXIT_ERRORS = 2
EXIT_PARSE = 3
EXIT_IO = 4
EXIT_SCRIPT = 5


def _use_color() -> bool:
    env = os.environ.get("IASDO_COLOR")
    if env == "1":
        return True
    if env == "0":
        return False
    return sys.stdout.isatty()


def _paint(text: str, code: str, color: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if color else text


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _parse_file(path: str, first_error_only: bool = False):
    text = _read(path)
    try:
        return parse_model(text, filename=path, first_error_only=first_error_only)
    except ParseFailure as failure:
        for error in failure.errors:
            print(str(error), file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _print_report(report: ValidationReport, color: bool) -> None:
    for diag in report.diagnostics:
        severity = diag.severity.value
        painted = _paint(severity, "31" if diag.severity is Severity.ERROR else "33", color)
        elements = ", ".join(diag.elements)
        print(f"{painted} {diag.rule} [{elements}]: {diag.message}")
    print(f"{report.error_count} error(s), {report.warning_count} warning(s)")


def _report_exit(report: ValidationReport, fail_on_warning: bool) -> int:
    if report.has_errors:
        return EXIT_ERRORS
    if report.warning_count:
        return EXIT_ERRORS if fail_on_warning else EXIT_WARNINGS
    return EXIT_CLEAN


def _cmd_validate(args: argparse.Namespace) -> int:
    model = _parse_file(args.model, args.first_error_only)
    report = validate(model, strict_r1_direct=args.strict_r1_direct)
    if args.fix:
        for grant in missing_r2_grants(model):
            print(f"grant {grant.role} {grant.privilege.value} on {grant.class_name};")
        return _report_exit(report, args.fail_on_warning)
    if args.format == "json":
        print(report_to_json(report))
    else:
        _print_report(report, _use_color())
    return _report_exit(report, args.fail_on_warning)


def _cmd_simulate(args: argparse.Namespace) -> int:
    model = _parse_file(args.model)
    report = validate(model)
    if report.has_errors:
        print("model has validation errors; simulation aborted", file=sys.stderr)
        _print_report(report, False)
        return EXIT_ERRORS
    script_text = _read(args.script)
    try:
        lines = parse_script(script_text)
    except ScriptError as exc:
        print(f"{args.script}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    runner = ScriptRunner(model)
    result = runner.run(lines)
    if args.format == "json":
        payload = {
            "passed": result.passed,
            "lines": [
                {"line": r.line_no, "text": r.text, "ok": r.ok, "message": r.message}
                for r in result.lines
            ],
            "world": runner.world.snapshot_dict(),
        }
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        color = _use_color()
        for r in result.lines:
            status = _paint("ok  ", "32", color) if r.ok else _paint("FAIL", "31", color)
            print(f"{status} {r.line_no:>3}  {r.text}  # {r.message}")
        print(f"{len(result.failures)} failing line(s) of {len(result.lines)}")
    if args.snapshot:
        try:
            with open(args.snapshot, "w", encoding="utf-8") as handle:
                handle.write(world_to_json(runner.world))
        except OSError as exc:
            print(f"error: cannot write {args.snapshot}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_CLEAN if result.passed else EXIT_SCRIPT


def _cmd_export(args: argparse.Namespace) -> int:
    model = _parse_file(args.model)
    print(model_to_dot(model), end="")
    return EXIT_CLEAN


def _cmd_fmt(args: argparse.Namespace) -> int:
    model = _parse_file(args.model)
    rendered = render_model(model)
    if args.in_place:
        try:
            with open(args.model, "w", encoding="utf-8") as handle:
                handle.write(rendered)
        except OSError as exc:
            print(f"error: cannot write {args.model}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        print(rendered, end="")
    return EXIT_CLEAN


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iasdo",
        description="Validate, simulate, format, and export information "
        "manufacturing models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="run the static rule catalog")
    p_validate.add_argument("model")
    p_validate.add_argument("--format", choices=("text", "json"), default="text")
    p_validate.add_argument(
        "--strict-r1-direct",
        action="store_true",
        help="R1 accepts only direct ED/DS links, not paths",
    )
    p_validate.add_argument("--fail-on-warning", action="store_true")
    p_validate.add_argument(
        "--fix",
        action="store_true",
        help="print the grant declarations R2 is missing instead of the report",
    )
    p_validate.add_argument("--first-error-only", action="store_true")
    p_validate.set_defaults(func=_cmd_validate)

    p_simulate = sub.add_parser("simulate", help="validate, then replay a trace script")
    p_simulate.add_argument("model")
    p_simulate.add_argument("script")
    p_simulate.add_argument("--format", choices=("text", "json"), default="text")
    p_simulate.add_argument("--snapshot", help="write the final world state as JSON")
    p_simulate.set_defaults(func=_cmd_simulate)

    p_export = sub.add_parser("export", help="emit the class graph")
    p_export.add_argument("model")
    p_export.add_argument("--format", choices=("dot",), default="dot")
    p_export.set_defaults(func=_cmd_export)

    p_fmt = sub.add_parser("fmt", help="canonical formatting")
    p_fmt.add_argument("model")
    p_fmt.add_argument("--in-place", action="store_true")
    p_fmt.set_defaults(func=_cmd_fmt)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
