"""Command-line entry point: validate, evaluate, plan, diff, serve.

Exit codes: 0 success, 1 diagnostics with errors, 2 usage error. Diagnostics
go to standard error; machine-readable output stays clean on standard output.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from smm import report
from smm.dsl import parse_assessment, parse_model
from smm.errors import ParseError, SmmError
from smm.model import (
    Assessment,
    Diagnostic,
    MaturityLevel,
    MaturityModel,
    has_errors,
    validate_assessment,
    validate_model,
)
from smm.planner import EXHAUSTIVE_THRESHOLD, Method, plan
from smm.scoring import evaluate


def _print_diagnostics(diagnostics) -> None:
    for diag in diagnostics:
        prefix = f"{diag.location}: " if diag.location is not None else ""
        print(f"{prefix}{diag.severity.value}: {diag.rule_code}: {diag.message}", file=sys.stderr)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_model(path: str) -> MaturityModel:
    return parse_model(_read_text(path), file=path)


def _load_assessment(path: str) -> Assessment:
    return parse_assessment(_read_text(path), file=path)


def _load_valid_pair(model_path: str, assessment_path: str) -> tuple[MaturityModel, Assessment]:
    model = _load_model(model_path)
    diagnostics = validate_model(model)
    if has_errors(diagnostics):
        _print_diagnostics(diagnostics)
        raise SystemExit(1)
    assessment = _load_assessment(assessment_path)
    diagnostics = validate_assessment(assessment, model)
    if has_errors(diagnostics):
        _print_diagnostics(diagnostics)
        raise SystemExit(1)
    return model, assessment


def _cmd_validate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    diagnostics: list[Diagnostic] = validate_model(model)
    if args.assessment is not None:
        if not has_errors(diagnostics):
            assessment = _load_assessment(args.assessment)
            diagnostics += validate_assessment(assessment, model)
    _print_diagnostics(diagnostics)
    return 1 if has_errors(diagnostics) else 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    model, assessment = _load_valid_pair(args.model, args.assessment)
    result = evaluate(model, assessment)
    if args.format == "json":
        sys.stdout.write(report.render_json(result, method=args.method))
    else:
        sys.stdout.write(report.render_text(result, method=args.method))
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    model, assessment = _load_valid_pair(args.model, args.assessment)
    target = MaturityLevel.parse(args.target)
    improvement = plan(
        model, assessment, args.kpa, Method(args.method), target,
        exhaustive_threshold=args.threshold, deadline_ms=args.deadline_ms,
    )
    sys.stdout.write(report.render_plan_text(improvement, model))
    return 0


def _cmd_diff(args: argparse.Namespace) -> int:
    model, before = _load_valid_pair(args.model, args.before)
    after = _load_assessment(args.after)
    diagnostics = validate_assessment(after, model)
    if has_errors(diagnostics):
        _print_diagnostics(diagnostics)
        return 1
    comparison = report.diff(evaluate(model, before), evaluate(model, after))
    sys.stdout.write(report.render_diff_text(comparison))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from smm.service import create_app
    from smm.store import Store

    root = args.store or os.environ.get("SMM_STORE_ROOT")
    if not root:
        print("error: --store or SMM_STORE_ROOT is required", file=sys.stderr)
        return 2
    app = create_app(Store(root), exhaustive_threshold=args.threshold,
                     max_body_bytes=args.max_body)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smm",
        description="Software maturity models: validate, evaluate, plan improvements, serve",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model (and optionally an assessment) for problems")
    p.add_argument("model", help="path to a .smmdl model file")
    p.add_argument("assessment", nargs="?", default=None, help="optional path to a .smma file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("evaluate", help="evaluate an assessment and print the report")
    p.add_argument("--model", required=True)
    p.add_argument("--assessment", required=True)
    p.add_argument("--method", choices=["compensatory", "two-tier", "both"], default="both")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("plan", help="plan minimal improvements for one KPA")
    p.add_argument("--model", required=True)
    p.add_argument("--assessment", required=True)
    p.add_argument("--kpa", required=True)
    p.add_argument("--target", required=True,
                   help="target level: initial, intermediate, advanced or optimizing (any case)")
    p.add_argument("--method", choices=["compensatory", "two-tier"], default="compensatory")
    p.add_argument("--threshold", type=int, default=EXHAUSTIVE_THRESHOLD,
                   help="max increments for exhaustive search")
    p.add_argument("--deadline-ms", type=int, default=None, dest="deadline_ms")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("diff", help="compare two assessments of the same model")
    p.add_argument("--model", required=True)
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.set_defaults(func=_cmd_diff)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--store", default=None, help="store root directory (or SMM_STORE_ROOT)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--threshold", type=int,
                   default=int(os.environ.get("SMM_EXHAUSTIVE_THRESHOLD", EXHAUSTIVE_THRESHOLD)))
    p.add_argument("--max-body", type=int,
                   default=int(os.environ.get("SMM_MAX_BODY_BYTES", 1 << 20)))
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _print_diagnostics(exc.diagnostics)
        return 1
    except ValueError as exc:
        parser.error(str(exc))  # exits 2
        return 2
    except FileNotFoundError as exc:
        return _fail(f"{exc.filename}: file not found")
    except SmmError as exc:
        if exc.diagnostics:
            _print_diagnostics(exc.diagnostics)
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
