"""Command-line front end.

Subcommands: eval, sweep, check, calibrate, integral.  Every stdout line
is a single JSON object; human-readable diagnostics go to stderr.  Exit
codes: 0 success / all checks passed, 1 a bound or calibration failed,
2 usage error (bad flags, bad config file, inputs outside the domain),
3 a result could not be certified to tolerance.

Settings come from defaults, then an optional JSON config file
(--config), then explicit flags, in that order.  The effective
configuration is echoed into every written report.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import AccuracyError, DomainError, NumericError, UsageError
from .kernels import (
    RegimeConfig,
    delta_product_approx,
    gauss_kernel,
    halfspace_kernel,
    interior_lower_bound,
    kernel_eval,
    tangent_product_approx,
)
from .geometry import tangent_halfspace, unit_direction
from .oracles import (
    McConfig,
    SeriesConfig,
    inverse_gamma_conv_scaled,
    inverse_gamma_conv_shape,
    mc_kernel,
    series_kernel,
)
from .experiments import (
    SweepSpec,
    calibrate_regimes,
    emit_report,
    run_bound_suite,
    run_rate_sweep,
    worker_count,
    SUITES,
)

_METHODS = ("auto", "thm1", "thm2", "vdb", "halfspace", "gauss", "series", "mc")
_FAMILY_ALIASES = {
    "diagonal": "diagonal-approach",
    "chord": "chord-approach",
    "midpoint": "midpoint-scaling",
    "diagonal-approach": "diagonal-approach",
    "chord-approach": "chord-approach",
    "midpoint-scaling": "midpoint-scaling",
}


@dataclass(frozen=True)
class CliConfig:
    """Effective settings shared by the subcommands.

    Mirrors RegimeConfig / SeriesConfig / McConfig plus output plumbing;
    building those dataclasses re-checks their invariants, so a config
    file can only express states the library itself accepts.
    """

    dimension: int = 2
    tangent_threshold: float = 5.0
    ratio_threshold: float = 0.2
    time_threshold: float = 0.05
    interior_threshold: float = 10.0
    series_tail_tol: float = 1e-8
    series_max_radial_modes: int = 900
    series_max_angular_modes: int = 2600
    mc_paths: int = 100000
    mc_seed: int = 0
    mc_dt: float | None = None
    out: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise UsageError("dimension must be 2 or 3")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        self.regime()
        self.series()
        self.mc()

    def regime(self) -> RegimeConfig:
        try:
            return RegimeConfig(self.tangent_threshold, self.ratio_threshold,
                                self.time_threshold, self.interior_threshold)
        except DomainError as exc:
            raise UsageError(str(exc)) from None

    def series(self, dimension: int | None = None) -> SeriesConfig:
        try:
            return SeriesConfig(dimension or self.dimension,
                                self.series_tail_tol,
                                self.series_max_radial_modes,
                                self.series_max_angular_modes)
        except DomainError as exc:
            raise UsageError(str(exc)) from None

    def mc(self) -> McConfig:
        try:
            return McConfig(self.mc_paths, self.mc_seed, self.mc_dt)
        except DomainError as exc:
            raise UsageError(str(exc)) from None


_CLI_FIELDS = {f.name: f for f in fields(CliConfig)}


def load_cli_config(path: str) -> dict:
    """Read a JSON config file, rejecting unknown keys."""
    try:
        with open(path, "rb") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = sorted(set(raw) - set(_CLI_FIELDS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return raw


def effective_config(args: argparse.Namespace) -> CliConfig:
    """defaults <- config file <- explicit flags."""
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(load_cli_config(args.config))
    for name in _CLI_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            merged[name] = v
    try:
        return CliConfig(**merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _emit_line(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _write_report(report_obj, cfg: CliConfig) -> str | None:
    if cfg.out is None:
        return None
    rep = report_obj.report() if hasattr(report_obj, "report") else dict(report_obj)
    rep = dict(rep)
    rep_cfg = dict(rep.get("config", {}))
    rep_cfg["cli"] = asdict(cfg)
    rep["config"] = rep_cfg
    data = emit_report(rep, cfg.format)
    with open(cfg.out, "wb") as fh:
        fh.write(data)
    return cfg.out


def _parse_point(text: str) -> np.ndarray:
    try:
        coords = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed coordinates {text!r}") from None
    if len(coords) < 2:
        raise UsageError("points need at least two comma-separated coordinates")
    return np.asarray(coords, dtype=float)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = effective_config(args)
    t = args.t
    x = _parse_point(args.x)
    y = _parse_point(args.y)
    method = args.method
    if x.size != y.size:
        raise UsageError("x and y must have the same dimension")
    try:
        if method == "auto":
            est = kernel_eval(t, x, y, cfg.regime(), cfg.series(x.size))
            value, regime, indicator = est.value, est.regime, est.error_indicator
        elif method == "thm1":
            est = tangent_product_approx(t, x, y)
            value, regime, indicator = est.value, "thm1", est.error_indicator
        elif method == "thm2":
            est = delta_product_approx(t, x, y)
            value, regime, indicator = est.value, "thm2", est.error_indicator
        elif method == "vdb":
            value, regime, indicator = interior_lower_bound(t, x, y), "vdb", 0.0
        elif method == "halfspace":
            H = tangent_halfspace(unit_direction(x))
            value = halfspace_kernel(t, x, y, H)
            regime, indicator = "halfspace", 0.0
        elif method == "gauss":
            value, regime, indicator = gauss_kernel(t, x, y), "gauss", 0.0
        elif method == "series":
            res = series_kernel(t, x, y, cfg.series(x.size))
            value, regime = res.value, "series"
            indicator = res.err / abs(value) if value != 0.0 else res.err
        elif method == "mc":
            res = mc_kernel(t, x, y, cfg.mc())
            value, regime = res.value, "mc"
            indicator = res.err / abs(value) if value != 0.0 else res.err
        else:
            raise UsageError(f"unknown method {method!r}")
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _emit_line({"value": value, "regime": regime, "error_indicator": indicator,
                "t": t, "method": method})
    return 0


def _build_sweep_spec(args: argparse.Namespace, cfg: CliConfig) -> SweepSpec:
    family = _FAMILY_ALIASES.get(args.family)
    if family is None:
        raise UsageError(f"unknown family {args.family!r}")
    approximant = {1: "tangent-product", 2: "delta-product"}[args.theorem]
    kw: dict = {
        "path_family": family,
        "approximant": approximant,
        "dimension": cfg.dimension,
        "oracle": args.oracle,
        "regime": cfg.regime(),
        "series": cfg.series(),
        "exponential_variant": not args.linear,
    }
    if args.oracle == "mc":
        kw["mc"] = cfg.mc()
    if family == "chord-approach":
        if args.t_fixed is None:
            raise UsageError("chord sweeps need --t-fixed")
        kw.update(delta=args.delta,
                  t_fixed=args.t_fixed,
                  sep_grid=tuple(np.geomspace(args.sep_min, args.sep_max,
                                              args.points)))
    else:
        kw["t_grid"] = tuple(np.geomspace(args.t_min, args.t_max, args.points))
        if family == "diagonal-approach":
            kw.update(delta=args.delta, separation=args.separation)
        else:
            kw["delta_exponent"] = args.delta_exponent
    try:
        return SweepSpec(**kw)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = effective_config(args)
    spec = _build_sweep_spec(args, cfg)
    fit = run_rate_sweep(spec)
    out = _write_report(fit, cfg)
    _emit_line({
        "command": "sweep",
        "family": spec.path_family,
        "approximant": spec.approximant,
        "slope": fit.slope,
        "envelope_C": fit.envelope_C,
        "n_valid": fit.n_valid,
        "n_points": len(fit.records),
        "out": out,
    })
    ok = fit.n_valid > 0 and math.isfinite(fit.envelope_C)
    return 0 if ok else 1


def cmd_check(args: argparse.Namespace) -> int:
    cfg = effective_config(args)
    suites = args.suite if args.suite else None
    report = run_bound_suite(args.seed, args.cases, suites)
    out = _write_report(report, cfg)
    for res in report.results:
        _emit_line({
            "suite": res.name,
            "fitted": res.fitted,
            "ceiling": math.nan if res.ceiling is None else res.ceiling,
            "violations": res.violations,
            "n_cases": res.n_cases,
            "n_skipped": res.n_skipped,
            "passed": res.passed,
        })
    passed = sum(1 for r in report.results if r.passed)
    _emit_line({"command": "check", "passed": passed,
                "failed": len(report.results) - passed, "out": out})
    return 0 if report.all_passed else 1


def cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = effective_config(args)
    result = calibrate_regimes(args.target, cfg.series(2))
    out = _write_report(result, cfg)
    line = {"command": "calibrate", "success": result.success,
            "target_rel_err": result.target_rel_err,
            "grid_hash": result.grid_hash, "message": result.message,
            "out": out}
    if result.config is not None:
        line.update(tangent_threshold=result.config.tangent_threshold,
                    ratio_threshold=result.config.ratio_threshold,
                    time_threshold=result.config.time_threshold)
    _emit_line(line)
    return 0 if result.success else 1


def cmd_integral(args: argparse.Namespace) -> int:
    res = inverse_gamma_conv_scaled(args.t, args.a, args.b,
                                    args.alpha, args.beta, args.tol)
    damp = math.exp(-(args.a + args.b) ** 2 / args.t)
    shape = inverse_gamma_conv_shape(args.t, args.a, args.b,
                                     args.alpha, args.beta)
    _emit_line({
        "command": "integral",
        "value": res.value * damp,
        "err": res.err * damp,
        "shape": shape,
        "ratio_to_shape": res.value * damp / shape if shape > 0 else math.nan,
        "t": args.t, "a": args.a, "b": args.b,
        "alpha": args.alpha, "beta": args.beta,
    })
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="JSON config file (flags override it)")
    g.add_argument("--dimension", type=int, default=None)
    g.add_argument("--tangent-threshold", dest="tangent_threshold",
                   type=float, default=None)
    g.add_argument("--ratio-threshold", dest="ratio_threshold",
                   type=float, default=None)
    g.add_argument("--time-threshold", dest="time_threshold",
                   type=float, default=None)
    g.add_argument("--interior-threshold", dest="interior_threshold",
                   type=float, default=None)
    g.add_argument("--series-tail-tol", dest="series_tail_tol",
                   type=float, default=None)
    g.add_argument("--series-max-radial-modes", dest="series_max_radial_modes",
                   type=int, default=None)
    g.add_argument("--series-max-angular-modes", dest="series_max_angular_modes",
                   type=int, default=None)
    g.add_argument("--mc-paths", dest="mc_paths", type=int, default=None)
    g.add_argument("--mc-seed", dest="mc_seed", type=int, default=None)
    g.add_argument("--mc-dt", dest="mc_dt", type=float, default=None)
    g.add_argument("--out", default=None, help="report destination path")
    g.add_argument("--format", default=None, choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhk",
        description="Short-time Dirichlet heat kernel estimates on the unit ball.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate the kernel at one (t, x, y)")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", required=True, help="comma-separated coordinates")
    p.add_argument("--y", required=True, help="comma-separated coordinates")
    p.add_argument("--method", default="auto", choices=_METHODS)
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="rate sweep of an approximant vs an oracle")
    p.add_argument("--family", default="diagonal",
                   help="diagonal | chord | midpoint (long forms accepted)")
    p.add_argument("--theorem", type=int, default=1, choices=(1, 2))
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--separation", type=float, default=0.0)
    p.add_argument("--t-min", dest="t_min", type=float, default=1e-5)
    p.add_argument("--t-max", dest="t_max", type=float, default=1e-2)
    p.add_argument("--points", type=int, default=12)
    p.add_argument("--t-fixed", dest="t_fixed", type=float, default=None)
    p.add_argument("--sep-min", dest="sep_min", type=float, default=1e-3)
    p.add_argument("--sep-max", dest="sep_max", type=float, default=0.5)
    p.add_argument("--delta-exponent", dest="delta_exponent",
                   type=float, default=0.6)
    p.add_argument("--oracle", default="series", choices=("series", "mc"))
    p.add_argument("--linear", action="store_true",
                   help="use the linear delta-product variant")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="run inequality bound suites")
    p.add_argument("--suite", action="append", default=None,
                   help=f"repeatable; default all ({', '.join(SUITES)})")
    p.add_argument("--cases", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    _add_config_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("calibrate", help="refit regime thresholds")
    p.add_argument("--target", type=float, default=1e-2,
                   help="target relative error for both approximants")
    _add_config_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("integral", help="inverse-gamma convolution integral")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_integral)

    # let --x -0.5,0 parse; argparse's stock matcher rejects commas
    neg = re.compile(r"^-\d")
    parser._negative_number_matcher = neg
    for sp in sub.choices.values():
        sp._negative_number_matcher = neg
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        worker_count()  # surface a malformed BHK_THREADS before any work
        return args.func(args)
    except UsageError as exc:
        print(f"bhk: usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"bhk: invalid input: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(f"bhk: accuracy error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"bhk: numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
