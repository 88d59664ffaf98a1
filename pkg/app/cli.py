"""Command-line front end.

Usage:
  python scripts/finsler.py tensors  --phi randers --fixture standard --s 0.3
  python scripts/finsler.py classify --phi shen_landsberg --params c1=1,c2=0.5
  python scripts/finsler.py verify   --phi kropina --fixture kropina --seed 7
  python scripts/finsler.py ode-check --check residuals --q linear:c1=1,c2=0.5,b_sq=0.36
  python scripts/finsler.py suite

Reports go to stdout (or ``--out``), logs to stderr. Exit codes: 0 ok,
1 acceptance failure, 2 configuration error, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Literal, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError

from app.core.config import settings
from app.core.errors import AcceptanceFailure, ConfigError, FinslerError
from app.core.reporting import dumps_csv, dumps_json, envelope, write_text
from app.fixtures import load_fixture
from app.models.geometry import MetricPoint
from app.models.phi import PhiFamily, PhiSpec, QKind, QSpec
from app.schemas.reports import OdeResidualReport
from app.services.classifier import DEFAULT_GRID_SIZE, classify, default_grid
from app.services.ode_lab import OdeCheck, run_ode_check
from app.services.snapshot import tensor_csv_rows, tensor_report
from app.services.suite import run_suite
from app.services.verification import DEFAULT_SAMPLES, VERIFY_TOL, verify_family

logger = logging.getLogger(__name__)

Command = Literal["tensors", "classify", "verify", "ode-check", "suite"]


class RunConfig(BaseModel):
    command: Command
    fixture: str = "standard"
    phi: Optional[PhiSpec] = None
    grid_size: int = Field(default=DEFAULT_GRID_SIZE, ge=3)
    tol: Optional[float] = Field(default=None, gt=0)
    output: Literal["json", "csv"] = "json"
    output_path: Optional[Path] = None
    seed: int = 0
    s: Optional[float] = None
    y: Optional[list[float]] = None
    samples: int = Field(default=DEFAULT_SAMPLES, ge=1)
    check: OdeCheck = OdeCheck.residuals
    params: dict[str, Any] = Field(default_factory=dict)
    q: Optional[QSpec] = None


# ---- flag parsing ---------------------------------------------------------


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{text!r} is not a number") from exc


def parse_params(raw: str | None) -> dict[str, Any]:
    """``{"c": 2}`` (JSON) or ``c=2,b_sq=1`` (key=value pairs)."""
    if not raw:
        return {}
    raw = raw.strip()
    if raw.startswith("{"):
        try:
            parsed = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}") from exc
        if not isinstance(parsed, dict):
            raise ConfigError("--params JSON must be an object")
        return parsed
    out: dict[str, Any] = {}
    for item in filter(None, (part.strip() for part in raw.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--params entry {item!r} is not key=value")
        out[key.strip()] = _number(value)
    return out


def parse_q(raw: str | None) -> QSpec | None:
    """``linear:c1=1,c2=0.5,b_sq=0.36``, ``berwald:c=2,b_sq=1``,
    ``polynomial:0,0,1`` or a QSpec JSON document."""
    if not raw:
        return None
    raw = raw.strip()
    try:
        if raw.startswith("{"):
            return QSpec.model_validate_json(raw)
        kind, _, rest = raw.partition(":")
        if kind == QKind.polynomial.value:
            return QSpec.polynomial([_number(v) for v in rest.split(",") if v.strip()])
        return QSpec(kind=kind, params=parse_params(rest))
    except ValidationError as exc:
        raise ConfigError(f"invalid --q {raw!r}: {exc.errors()[0]['msg']}") from exc


def _fill_b_sq(params: dict[str, Any], mp: MetricPoint) -> dict[str, Any]:
    if "b_sq" not in params:
        logger.info("taking b_sq = %.6g from the fixture", mp.b_sq)
        params = {**params, "b_sq": mp.b_sq}
    return params


def build_phi(family: str, params: dict[str, Any], c3: float, mp: MetricPoint) -> PhiSpec:
    try:
        fam = PhiFamily(family)
    except ValueError as exc:
        choices = ", ".join(f.value for f in PhiFamily)
        raise ConfigError(f"unknown phi family {family!r} (choose from {choices})") from exc
    try:
        if fam is PhiFamily.shen_landsberg and "k" in params:
            return PhiSpec.shen_landsberg_normalized(
                params["k"], params.get("c", 0.0), params.get("b0", mp.b_norm), c3
            )
        if fam in (PhiFamily.shen_berwald, PhiFamily.shen_landsberg, PhiFamily.sqrt_linear):
            params = _fill_b_sq(params, mp)
        return PhiSpec(family=fam, params=params, c3=c3)
    except ValidationError as exc:
        raise ConfigError(f"invalid phi {family}: {exc.errors()[0]['msg']}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixture", default="standard", help="Bundled fixture name or JSON path")
    common.add_argument("--phi", help="phi family (riemannian, randers, kropina, shen_berwald, ...)")
    common.add_argument("--params", help='Family parameters: JSON object or "k=v,k=v"')
    common.add_argument("--c3", type=float, default=1.0, help="Positive constant factor of phi")
    common.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE, help="Number of s-grid points")
    common.add_argument("--tol", type=float, help="Tolerance (defaults to FINSLER_TOL)")
    common.add_argument("--out", type=Path, help="Write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="finsler", description="(alpha, beta)-metric tensor toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    tensors = sub.add_parser("tensors", parents=[common], help="g, g^-1, C, T and raised T at one direction")
    tensors.add_argument("--s", type=float, help="Realize a direction with beta/alpha = s")
    tensors.add_argument("--y", help="Explicit direction, comma separated")

    sub.add_parser("classify", parents=[common], help="Riemannian / T-condition / sigmaT-condition verdict")

    verify = sub.add_parser("verify", parents=[common], help="Closed forms against the multi-dual oracle")
    verify.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    ode = sub.add_parser("ode-check", parents=[common], help="Q-equation residuals and phi reconstructions")
    ode.add_argument("--check", choices=[c.value for c in OdeCheck], default=OdeCheck.residuals.value)
    ode.add_argument("--q", help='Q spec: "linear:c1=..,c2=..,b_sq=..", "berwald:c=..,b_sq=..", "polynomial:a0,a1,.."')

    sub.add_parser("suite", parents=[common], help="Full acceptance battery")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    raw: dict[str, Any] = {
        "command": args.command,
        "fixture": args.fixture,
        "grid_size": args.grid,
        "tol": args.tol,
        "output": args.format,
        "output_path": args.out,
        "seed": args.seed,
        "params": parse_params(args.params),
    }
    if args.command == "tensors":
        raw["s"] = args.s
        if args.y:
            raw["y"] = [_number(v) for v in args.y.split(",")]
    if args.command == "verify":
        raw["samples"] = args.samples
    if args.command == "ode-check":
        raw["check"] = args.check
        raw["q"] = parse_q(args.q)
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        raise ConfigError(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}") from exc
    if args.command in ("tensors", "classify", "verify"):
        if not args.phi:
            raise ConfigError(f"{args.command} needs --phi")
        mp = load_fixture(config.fixture)
        config.phi = build_phi(args.phi, config.params, args.c3, mp)
    return config


# ---- commands -------------------------------------------------------------


def _ode_csv(report) -> str:
    header = ["s", "residual_trivial", "residual_landsberg", "phi_closed", "phi_quadrature", "ratio"]
    if isinstance(report, OdeResidualReport):
        columns = [report.residual_trivial, report.residual_landsberg, [], [], []]
    else:
        columns = [[], [], report.phi_closed, report.phi_quadrature, report.ratio]

    def cell(column: list, i: int):
        return "" if i >= len(column) or column[i] is None else column[i]

    rows = ([s] + [cell(col, i) for col in columns] for i, s in enumerate(report.grid))
    return dumps_csv(header, rows)


def execute(config: RunConfig) -> tuple[str, bool]:
    """Run one command; returns the rendered report and whether it passed."""

    passed = True
    csv_text: str | None = None
    match config.command:
        case "tensors":
            report = tensor_report(load_fixture(config.fixture), config.phi, y=config.y, s=config.s)
            csv_text = dumps_csv(["tensor", "index", "value"], tensor_csv_rows(report))
        case "classify":
            mp = load_fixture(config.fixture)
            grid = default_grid(config.phi, mp.b_sq, config.grid_size)
            report = classify(mp, config.phi, grid, config.tol)
            csv_text = dumps_csv(["residual", "value"], sorted(report.residuals.items()))
        case "verify":
            report = verify_family(
                load_fixture(config.fixture),
                config.phi,
                n=config.samples,
                seed=config.seed,
                tol=config.tol or VERIFY_TOL,
            )
            passed = report.passed
            keys = sorted(report.worst)
            csv_text = dumps_csv(
                ["s"] + keys,
                ([sample.s] + [sample.comparisons[k].max_rel for k in keys] for sample in report.samples),
            )
        case "ode-check":
            params = dict(config.params)
            if config.check not in (OdeCheck.asanov, OdeCheck.residuals) and "k" not in params:
                params = _fill_b_sq(params, load_fixture(config.fixture))
            report = run_ode_check(config.check, params, q=config.q, grid_size=config.grid_size)
            passed = getattr(report, "passed", True)
            csv_text = _ode_csv(report)
        case "suite":
            report = run_suite(seed=config.seed, tol=config.tol)
            passed = report.passed
            csv_text = dumps_csv(
                ["number", "name", "passed"], ((c.number, c.name, c.passed) for c in report.criteria)
            )
    if config.output == "csv":
        return csv_text, passed
    return dumps_json(envelope(config.command, report, seed=config.seed)), passed


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = build_config(args)
        logger.info("running %s (tol %s)", config.command, config.tol or settings.TOL)
        text, passed = execute(config)
        write_text(text, config.output_path)
        if not passed:
            raise AcceptanceFailure(f"{config.command} reported failures")
    except FinslerError as exc:
        print(f"finsler: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
