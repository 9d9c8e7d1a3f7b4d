"""Command-line front end.

    ulamlab stability --config run.json --out results/
    ulamlab batch --config configs/ --out results/ --jobs 4

Exit codes: 0 all verdicts pass, 1 a checked claim failed, 2 configuration or
structural error, 3 superstability hypothesis violated, 4 divergence,
70 unexpected internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, env_seed, load_config
from .exceptions import UlamLabError
from .experiments import (
    EXIT_CONFIG,
    ExperimentReport,
    reference_config,
    run,
    run_axioms,
    run_extract,
    run_funceq_check,
    run_superstability,
)

EXIT_INTERNAL = 70
CURVE_HEADER = ("radius", "measured_error", "bound_value", "ratio")
log = logging.getLogger("ulamlab")

DEFAULTS = {
    "check-funceq": "funceq",
    "axioms": "axioms_matrices",
    "extract": "power_sum_shrink",
    "stability": "power_sum_shrink",
    "superstability": "superstability_exact",
}


def _run_stability(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.kind not in ("derivation_stability", "sigma_hom_stability"):
        raise UlamLabError(f"'stability' runs derivation or sigma-hom experiments, config kind is {cfg.kind!r}")
    return run(cfg)


def _require(kind: str, runner):
    def go(cfg: ExperimentConfig) -> ExperimentReport:
        if cfg.kind != kind:
            raise UlamLabError(f"expected a {kind!r} config, got {cfg.kind!r}")
        return runner(cfg)

    return go


RUNNERS = {
    "check-funceq": _require("funceq_check", run_funceq_check),
    "axioms": _require("axioms", run_axioms),
    "extract": run_extract,
    "stability": _run_stability,
    "superstability": _require("superstability", run_superstability),
}


# -- serialization --------------------------------------------------------------


def jsonable(obj):
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return obj


def dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_curves(rows, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for row in rows:
            w.writerow(["%.17g" % row[k] for k in CURVE_HEADER])


def write_verdict_table(report: ExperimentReport, path: Path) -> None:
    cols = ("claim", "passed", "value", "threshold", "margin", "inequality")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for v in report.verdicts:
            w.writerow([v.claim, v.passed, "%.17g" % v.value, "%.17g" % v.threshold, "%.17g" % v.margin, v.inequality])


@dataclass
class RunManifest:
    config_path: str | None
    out_dir: str
    artifacts: list[str] = field(default_factory=list)
    exit_status: int = 0
    runs: list[dict] = field(default_factory=list)

    def write(self) -> Path:
        path = Path(self.out_dir) / "manifest.json"
        dump_json(
            {
                "config_path": self.config_path,
                "out_dir": self.out_dir,
                "artifacts": self.artifacts,
                "exit_status": self.exit_status,
                "runs": self.runs,
            },
            path,
        )
        return path


def emit(report: ExperimentReport, out: Path, fmt: str) -> list[str]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        dump_json(report.to_dict(), out / "report.json")
        written.append("report.json")
    else:
        write_verdict_table(report, out / "report.csv")
        dump_json(report.config, out / "config.json")
        written += ["report.csv", "config.json"]
    if report.curves:
        write_curves(report.curves, out / "curves.csv")
        written.append("curves.csv")
    return written


def summarize(report: ExperimentReport) -> str:
    lines = [f"{report.kind}: {report.status} (exit {report.exit_code})"]
    if report.catalogue:
        lines.append(f"  base: {report.catalogue}")
    for v in report.verdicts:
        mark = "ok  " if v.passed else "FAIL"
        lines.append(f"  {mark} {v.claim}: {v.value:.3e} vs {v.threshold:.3e}")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else reference_config(DEFAULTS[args.command])
    seed = args.seed if args.seed is not None else env_seed()
    return cfg.with_overrides(seed=seed, shells=args.grid_shells, depth=args.depth)


def run_one(command: str, cfg: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[command](cfg)


def _single(args) -> int:
    try:
        cfg = resolve_config(args)
        report = run_one(args.command, cfg)
    except UlamLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        print(summarize(report))
    if args.out:
        out = Path(args.out)
        manifest = RunManifest(args.config, str(out), emit(report, out, args.format), report.exit_code)
        manifest.write()
    return report.exit_code


def _batch_item(path: Path, args) -> dict:
    entry = {"config": str(path), "name": path.stem}
    try:
        cfg = load_config(path)
        seed = args.seed if args.seed is not None else env_seed()
        cfg = cfg.with_overrides(seed=seed, shells=args.grid_shells, depth=args.depth)
        report = run(cfg)
    except UlamLabError as exc:
        entry.update(exit_status=EXIT_CONFIG, error=str(exc), artifacts=[])
        return entry
    entry.update(exit_status=report.exit_code, status=report.status, report=report)
    return entry


def _batch(args) -> int:
    if not args.config:
        print("error: batch needs --config DIR", file=sys.stderr)
        return EXIT_CONFIG
    src = Path(args.config)
    if not src.is_dir():
        print(f"error: {src} is not a directory of configs", file=sys.stderr)
        return EXIT_CONFIG
    paths = sorted(src.glob("*.json"))
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        entries = list(pool.map(lambda p: _batch_item(p, args), paths))
    out = Path(args.out) if args.out else None
    manifest = RunManifest(str(src), str(out) if out else "")
    for e in entries:
        report = e.pop("report", None)
        if report is not None:
            if out is not None:
                e["artifacts"] = [f"{e['name']}/{a}" for a in emit(report, out / e["name"], args.format)]
            if not args.quiet:
                print(summarize(report))
        elif not args.quiet:
            print(f"{e['name']}: error: {e['error']}")
        manifest.artifacts += e.get("artifacts", [])
        manifest.runs.append(e)
    manifest.exit_status = max((e["exit_status"] for e in entries), default=0)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        manifest.write()
    return manifest.exit_status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment config (a directory for batch)")
    common.add_argument("--out", metavar="DIR", help="write report, curves and manifest here")
    common.add_argument("--seed", type=int, metavar="K", help="override the config and grid seeds")
    common.add_argument("--grid-shells", type=int, metavar="J", help="override the number of grid shells")
    common.add_argument("--depth", type=int, metavar="N", help="override the extraction depth")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--quiet", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="ulamlab", description="Hyers-Ulam stability numerical lab")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "check-funceq": "monomial and classical residual checks across m and a",
        "axioms": "ternary algebra and module axiom reports",
        "extract": "single fixed-point extraction with diagnostics",
        "stability": "derivation or sigma-homomorphism stability pipeline",
        "superstability": "superstability audit",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    b = sub.add_parser("batch", parents=[common], help="run every *.json config in a directory")
    b.add_argument("--jobs", type=int, default=1, metavar="K", help="concurrent experiments")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _batch(args) if args.command == "batch" else _single(args)
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
