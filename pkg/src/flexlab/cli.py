"""Command-line front end.

    flexlab run [--config PATH] [--script PATH] [--out DIR]
    flexlab serve [--config PATH] [--port N] [--speed MIN_PER_S]
    flexlab validate [--config PATH]

`run` executes a scripted day headless, prints the energy-comparison table,
and (with --out) writes export.csv, summary.json, and commands.ndjson.
`serve` starts the live session service. `validate` checks a config without
running it. Bare script/config names fall back to the bundled assets, so
`flexlab run --script shed.json` works from anywhere.

Exit codes: 0 success, 2 validation error, 3 model divergence, 4 bind
failure. Errors go to standard error, one per line, as `<code>: <message>`.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
from pathlib import Path

from .config import asset_path, default_config_path, load_config
from .control import canonical_number
from .engine import RunSummary, run_day_engine, summarize
from .errors import ModelDivergenceError, ValidationError
from .export import write_command_log, write_csv, write_summary
from .scenario import ScenarioScript

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIVERGENCE = 3
EXIT_BIND = 4


def _fail(code: str, messages) -> None:
    if isinstance(messages, str):
        messages = [messages]
    for message in messages:
        print(f"{code}: {message}", file=sys.stderr)


def _resolve_asset(path: str) -> Path:
    """A bare name that isn't a local file may name a bundled asset."""
    p = Path(path)
    if not p.exists() and p.name == path:
        bundled = asset_path(path)
        if bundled.exists():
            return bundled
    return p


def format_table(summary: RunSummary) -> str:
    """Fixed-width period table: kWh to 2 decimals, percent to 1."""
    rows = (
        ("DR", summary.baseline.dr_kwh, summary.controlled.dr_kwh,
         summary.saving.dr_pct),
        ("non-DR", summary.baseline.non_dr_kwh, summary.controlled.non_dr_kwh,
         summary.saving.non_dr_pct),
        ("total", summary.baseline.total_kwh, summary.controlled.total_kwh,
         summary.saving.total_pct),
    )
    lines = [f"{'period':<8}{'baseline kWh':>14}{'controlled kWh':>16}"
             f"{'delta kWh':>11}{'delta %':>9}"]
    for name, base, ctrl, pct in rows:
        pct_cell = f"{pct:>9.1f}" if pct is not None else f"{'n/a':>9}"
        lines.append(f"{name:<8}{base:>14.2f}{ctrl:>16.2f}"
                     f"{base - ctrl:>11.2f}{pct_cell}")
    if summary.dr_intervals:
        spans = ", ".join(
            f"[{canonical_number(a)}, {canonical_number(b)})"
            for a, b in summary.dr_intervals)
    else:
        spans = "none"
    lines.append(f"DR intervals: {spans}")
    return "\n".join(lines)


def cmd_run(args: argparse.Namespace) -> int:
    config_path = Path(args.config) if args.config else default_config_path()
    try:
        config = load_config(config_path)
    except ValidationError as exc:
        _fail("validation", exc.violations)
        return EXIT_VALIDATION

    script = None
    if args.script:
        try:
            script = ScenarioScript.load(_resolve_asset(args.script))
        except ValidationError as exc:
            _fail("validation", exc.violations)
            return EXIT_VALIDATION

    try:
        engine = run_day_engine(config, script)
    except ValidationError as exc:
        _fail("validation", exc.violations)
        return EXIT_VALIDATION
    except ModelDivergenceError as exc:
        _fail("divergence", str(exc))
        return EXIT_DIVERGENCE

    summary = summarize(engine.frames)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(engine.frames, out / "export.csv")
        write_summary(summary, out / "summary.json")
        write_command_log(engine.command_history(), out / "commands.ndjson")
        log.info("wrote export.csv, summary.json, commands.ndjson to %s", out)
    print(format_table(summary))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    if args.speed <= 0:
        _fail("validation", "speed must be positive")
        return EXIT_VALIDATION
    config_path = Path(args.config) if args.config else default_config_path()
    try:
        load_config(config_path)          # fail fast, before binding
        doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except ValidationError as exc:
        _fail("validation", exc.violations)
        return EXIT_VALIDATION

    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
        probe.close()
    except OSError as exc:
        _fail("bind", f"cannot bind {args.host}:{args.port}: {exc}")
        return EXIT_BIND

    app = create_app(template_doc=doc, static_dir=_static_dir(),
                     default_speed=args.speed)
    url = f"http://{args.host}:{args.port}/"
    log.info("dashboard at %s", url)
    print(f"dashboard at {url}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config_path = Path(args.config) if args.config else default_config_path()
    try:
        load_config(config_path)
    except ValidationError as exc:
        _fail("validation", exc.violations)
        return EXIT_VALIDATION
    print(f"ok: {config_path}")
    return EXIT_OK


def _static_dir() -> Path | None:
    candidates = (
        Path.cwd() / "frontend" / "dist",
        Path(__file__).resolve().parents[3] / "frontend" / "dist",
    )
    for candidate in candidates:
        if candidate.is_dir():
            return candidate
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexlab",
        description="Two-timeline building demand-flexibility simulator.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="run a scripted day headless")
    run.add_argument("--config", help="config JSON (default: bundled)")
    run.add_argument("--script", help="scenario script JSON/NDJSON; bare names "
                                      "resolve to bundled scripts")
    run.add_argument("--out", help="directory for export.csv, summary.json, "
                                   "commands.ndjson")
    run.set_defaults(func=cmd_run)

    serve = sub.add_parser("serve", help="start the live session service")
    serve.add_argument("--config", help="default config template (default: bundled)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--speed", type=float, default=10.0,
                       help="default pace in simulated minutes per second")
    serve.set_defaults(func=cmd_serve)

    validate = sub.add_parser("validate", help="check a config without running")
    validate.add_argument("--config", help="config JSON (default: bundled)")
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("FLEXLAB_LOG", "INFO").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
