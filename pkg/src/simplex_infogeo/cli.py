"""simplex-infogeo command line.

Exit codes: 0 success, 1 a residual or margin check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Sequence

import tomli
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .config import get_settings
from .errors import ConfigError, InputError, SimplexError
from .ingest import Dataset, ingest_csv
from .models import OutputFormat, RunConfig
from .report import (
    audit_document,
    contrast_document,
    decompose_document,
    distance_document,
    distance_matrix,
    render_json,
    render_matrix_csv,
)
from .telemetry import stage_timer
from .workers import configure_logging, resolve_thread_count

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

# flags that map one-to-one onto RunConfig fields
CONFIG_FLAGS = (
    "measure",
    "alpha",
    "beta",
    "weights",
    "generator",
    "contrast",
    "zero_policy",
    "subset",
    "mode",
    "format",
)


@dataclass
class CommandResult:
    text: str
    passed: bool
    summary: Dict[str, Any]


def _add_run_flags(parser: argparse.ArgumentParser, *, needs_input: bool = True) -> None:
    parser.add_argument("--input", required=needs_input, help="CSV file: header of part names, first column sample ids")
    parser.add_argument("--measure", help="aitchison, kl, kl_reverse, alpha, hellinger, fisher, bhattacharyya, boxcox or f")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--weights", help="comma-separated nonnegative Box-Cox weights")
    parser.add_argument("--generator", help="f-divergence generator name")
    parser.add_argument("--contrast", help="helmert, pivot or file:<path>")
    parser.add_argument("--zero-policy", dest="zero_policy", help="error or replace:<eps>")
    parser.add_argument("--subset", help="comma-separated part names")
    parser.add_argument("--mode", help="subcomp, amalgam or geomean")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", help="json or csv (csv only for distance)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplex-infogeo",
        description="Distances, divergences and amalgamation reports for compositional data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="TOML file with run options; flags override it")
    parser.add_argument("--log-level", dest="log_level", help="logging level (default from SIMPLEX_INFOGEO_LOG_LEVEL)")
    parser.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(sub.add_parser("distance", help="pairwise distance or divergence matrix"))
    _add_run_flags(sub.add_parser("decompose", help="entropy, norm and distance decompositions"))
    _add_run_flags(sub.add_parser("monotonicity-audit", help="before/after amalgamation margins"))
    validate = sub.add_parser("contrast-validate", help="check a contrast matrix against the ilr basis conditions")
    _add_run_flags(validate, needs_input=False)
    validate.add_argument("--dimension", type=int, help="number of parts for built-in contrasts without --input")
    return parser


def _load_toml(path: str) -> Dict[str, Any]:
    try:
        with open(path, "rb") as handle:
            data = tomli.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    unknown = sorted(set(data) - set(CONFIG_FLAGS))
    if unknown:
        raise ConfigError(f"unknown keys in {path}: {unknown}")
    return data


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, Any] = _load_toml(args.config) if args.config else {}
    for name in CONFIG_FLAGS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        messages = "; ".join(err["msg"] for err in exc.errors())
        raise ConfigError(f"invalid run configuration: {messages}") from exc


def _load_dataset(args: argparse.Namespace, cfg: RunConfig) -> Dataset:
    with stage_timer("ingest", path=args.input):
        return ingest_csv(args.input, cfg.zero_policy)


def run_distance(args: argparse.Namespace, cfg: RunConfig, threads: int) -> CommandResult:
    ds = _load_dataset(args, cfg)
    matrix = distance_matrix(ds, cfg, threads=threads)
    if cfg.format is OutputFormat.CSV:
        text = render_matrix_csv(matrix)
    else:
        text = render_json(distance_document(matrix, cfg))
    return CommandResult(text, True, {"samples": ds.N, "parts": ds.D, "measure": cfg.measure.value})


def run_decompose(args: argparse.Namespace, cfg: RunConfig, threads: int) -> CommandResult:
    ds = _load_dataset(args, cfg)
    doc, passed = decompose_document(ds, cfg, threads=threads)
    return CommandResult(
        render_json(doc), passed, {"samples": ds.N, "pairs": len(doc["pairs"]), "mode": cfg.mode.value}
    )


def run_audit(args: argparse.Namespace, cfg: RunConfig, threads: int) -> CommandResult:
    ds = _load_dataset(args, cfg)
    doc, passed = audit_document(ds, cfg, threads=threads)
    failing = sum(1 for pair in doc["pairs"] if not pair["passed"])
    return CommandResult(render_json(doc), passed, {"pairs": len(doc["pairs"]), "failing pairs": failing})


def run_contrast_validate(args: argparse.Namespace, cfg: RunConfig, threads: int) -> CommandResult:
    ds = _load_dataset(args, cfg) if args.input else None
    doc, passed = contrast_document(cfg, ds, dimension=args.dimension)
    report = doc["report"]
    return CommandResult(
        render_json(doc),
        passed,
        {
            "kind": doc["kind"],
            "D": report["D"],
            "orthonormality deviation": f"{report['orthonormality_deviation']:.3e}",
            "projection deviation": f"{report['projection_deviation']:.3e}",
        },
    )


Handler = Callable[[argparse.Namespace, RunConfig, int], CommandResult]

SUBCOMMAND_HANDLERS: dict[str, Handler] = {
    "distance": run_distance,
    "decompose": run_decompose,
    "monotonicity-audit": run_audit,
    "contrast-validate": run_contrast_validate,
}


def _write_output(text: str, out: str | None) -> None:
    if not out:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps the rendered bytes identical across platforms
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _print_summary(console: Console, command: str, result: CommandResult) -> None:
    table = Table(title=f"simplex-infogeo {command}")
    table.add_column("field")
    table.add_column("value")
    for key, value in result.summary.items():
        table.add_row(str(key), str(value))
    table.add_row("status", "[green]passed[/green]" if result.passed else "[red]failed[/red]")
    console.print(table)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("simplex-infogeo", args.log_level)
    console = Console(stderr=True)
    try:
        cfg = build_run_config(args)
        if cfg.format is OutputFormat.CSV and args.command != "distance":
            raise ConfigError("--format csv is only available for the distance command")
        threads = resolve_thread_count(get_settings(), args.threads)
        handler = SUBCOMMAND_HANDLERS[args.command]
        with stage_timer(args.command, threads=threads):
            result = handler(args, cfg, threads)
        _write_output(result.text, args.out)
    except InputError as exc:
        logger.error("Input error: %s", exc)
        console.print(f"[red]input error:[/red] {exc}")
        return EXIT_INPUT_ERROR
    except SimplexError as exc:
        logger.error("Invalid data: %s", exc)
        console.print(f"[red]invalid data:[/red] {exc}")
        return EXIT_INPUT_ERROR
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        console.print(f"[red]i/o error:[/red] {exc}")
        return EXIT_INPUT_ERROR

    _print_summary(console, args.command, result)
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
