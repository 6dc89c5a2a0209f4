"""Command-line front end: run, sweep, bisect, verify.

Configuration lives in a flat key = value file (``#`` comments allowed)
so that every result is reproducible from a single committed file.  All
numbers in emitted artifacts carry 17 significant digits, which
round-trips doubles exactly; identical configurations therefore produce
byte-identical summaries.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .classifier import (
    Category,
    MonotonicityError,
    bisect_sigma_star,
    classify,
    sweep,
)
from .evolvers import ClassifierTolerances, EventKind, StepControl
from .geometry import ProblemParams
from .solutions import InitialFamily, grim_reaper_dominating_sigma
from .verification import run_all

__all__ = ["RunConfig", "load_config", "main"]

_DEFAULTS = {
    "A": 1.0,
    "a": 0.5,
    "grid_n": 201,
    "phi": "cos",
    "sigma": 0.1,
    "scheme": "semi_implicit",
    "cfl": 0.2,
    "t_max": 50.0,
    "sample_interval": 0.1,
    "slope_switch": 10.0,
    "converge": 1e-3,
    "escape_gap": 1e-3,
    "dissipation": 1e-4,
    "out_dir": "runs/out",
    "sigmas": "",
    "bisect_lo": 0.1,
    "bisect_hi": "auto",
    "width_tol": 0.01,
}

_FLOAT_KEYS = {
    "A",
    "a",
    "sigma",
    "cfl",
    "t_max",
    "sample_interval",
    "slope_switch",
    "converge",
    "escape_gap",
    "dissipation",
    "bisect_lo",
    "width_tol",
}
_INT_KEYS = {"grid_n"}
# remaining keys (phi, scheme, out_dir, sigmas, bisect_hi) stay strings


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated configuration for one invocation."""

    values: dict = field(default_factory=lambda: dict(_DEFAULTS))

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key)

    def params(self) -> ProblemParams:
        return ProblemParams(A=self.A, a=self.a, grid_n=self.grid_n)

    def family(self) -> InitialFamily:
        return InitialFamily(self.params(), sigma=self.sigma, phi=self.phi)

    def step_control(self) -> StepControl:
        return StepControl.for_params(
            self.params(),
            cfl=self.cfl,
            t_max=self.t_max,
            scheme=self.scheme,
            sample_interval=self.sample_interval,
            slope_switch=self.slope_switch,
        )

    def tolerances(self) -> ClassifierTolerances:
        return ClassifierTolerances(
            converge=self.converge,
            escape_gap=self.escape_gap,
            dissipation=self.dissipation,
            t_max=self.t_max,
        )

    def sigma_list(self):
        raw = self.sigmas.strip()
        if not raw:
            raise ConfigError("sweep needs 'sigmas', e.g. sigmas = -1,0,0.1")
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad sigmas list: {raw!r}") from exc

    def bisect_hi_value(self) -> float:
        raw = str(self.bisect_hi).strip()
        if raw == "auto":
            return grim_reaper_dominating_sigma(self.params())
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"bisect_hi must be a number or 'auto', got {raw!r}") from exc


def _coerce(key: str, raw: str):
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r} expects a number, got {raw!r}") from exc
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r} expects an integer, got {raw!r}") from exc
    return raw


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Parse a flat key = value file and apply command-line overrides."""
    values = dict(_DEFAULTS)
    if path is not None:
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, raw = (part.strip() for part in text.split("=", 1))
                if key not in values:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _coerce(key, raw)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    cfg = RunConfig(values)
    try:
        cfg.params()
        cfg.step_control()
        cfg.tolerances()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _json_dump(obj, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(cfg: RunConfig, quiet: bool) -> int:
    cat, traj = classify(cfg.family(), cfg.step_control(), cfg.tolerances())
    out = cfg.out_dir
    traj.write_outputs(out)
    summary = traj.summary_dict()
    summary["category"] = cat.value
    summary["undetermined"] = cat is Category.UNDETERMINED
    _json_dump(summary, os.path.join(out, "summary.json"))
    if not quiet:
        print(
            f"sigma={cfg.sigma}: {cat.value} ({traj.event.kind.value} at "
            f"t={traj.event.t:.3g}); artifacts in {out}"
        )
    return 2 if traj.event.kind is EventKind.BLOWUP else 0


def cmd_sweep(cfg: RunConfig, quiet: bool) -> int:
    rows = sweep(cfg.family(), cfg.sigma_list(), cfg.step_control(), cfg.tolerances())
    out = cfg.out_dir
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "sweep.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sigma,category,t_event,final_sgn\n")
        for r in rows:
            fh.write(
                f"{r.sigma:.17g},{r.category.value},{r.t_event:.17g},"
                f"{r.final_sgn or ''}\n"
            )
    if not quiet:
        for r in rows:
            print(f"sigma={r.sigma:g}: {r.category.value} at t={r.t_event:.3g}")
        print(f"sweep table in {path}")
    return 0


def cmd_bisect(cfg: RunConfig, quiet: bool) -> int:
    bracket = bisect_sigma_star(
        cfg.family(),
        cfg.bisect_lo,
        cfg.bisect_hi_value(),
        cfg.width_tol,
        cfg.step_control(),
        cfg.tolerances(),
    )
    out = cfg.out_dir
    payload = bracket.to_dict()
    payload["tolerances"] = {
        "converge": cfg.converge,
        "escape_gap": cfg.escape_gap,
        "dissipation": cfg.dissipation,
        "t_max": cfg.t_max,
        "width_tol": cfg.width_tol,
    }
    _json_dump(payload, os.path.join(out, "bracket.json"))
    if not quiet:
        print(
            f"critical amplitude in [{bracket.lo:.6g}, {bracket.hi:.6g}] "
            f"(width {bracket.width:.3g}); details in {out}/bracket.json"
        )
    return 0


def cmd_verify(only: str | None, quiet: bool) -> int:
    numbers = None
    if only:
        try:
            numbers = [int(tok) for tok in only.split(",") if tok.strip()]
        except ValueError:
            print(f"--only expects comma-separated criterion numbers, got {only!r}",
                  file=sys.stderr)
            return 1
        bad = [n for n in numbers if n not in range(1, 11)]
        if bad:
            print(f"unknown criteria {bad}; valid range is 1..10", file=sys.stderr)
            return 1
    results = run_all(numbers, quiet=quiet)
    return 0 if all(r.passed for r in results) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extremalflow",
        description="Driven curvature flow between fixed endpoints: "
        "simulate, sweep, bracket the critical amplitude, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_config=True):
        p.add_argument(
            "--config",
            required=need_config,
            metavar="PATH",
            help="flat key = value configuration file",
        )
        p.add_argument("--out", metavar="DIR", help="output directory override")
        p.add_argument("--sigma", type=float, help="amplitude override")
        p.add_argument("--grid", type=int, help="grid_n override")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p_run = sub.add_parser("run", help="evolve one amplitude and write artifacts")
    common(p_run)
    p_sweep = sub.add_parser("sweep", help="classify a list of amplitudes")
    common(p_sweep)
    p_sweep.add_argument(
        "--sigmas",
        help="comma-separated amplitudes (overrides config); use the "
        "--sigmas=-1,0,1 form when the list starts with a minus sign",
    )
    p_bisect = sub.add_parser("bisect", help="bracket the critical amplitude")
    common(p_bisect)
    p_bisect.add_argument("--lo", type=float, help="lower bracket endpoint override")
    p_bisect.add_argument("--hi", help="upper bracket endpoint override (number or 'auto')")
    p_bisect.add_argument("--width-tol", type=float, help="bracket width target override")
    p_verify = sub.add_parser("verify", help="run the acceptance suite")
    common(p_verify, need_config=False)
    p_verify.add_argument("--only", help="comma-separated criterion numbers, e.g. 1,2,10")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        "out_dir": getattr(args, "out", None),
        "sigma": getattr(args, "sigma", None),
        "grid_n": getattr(args, "grid", None),
        "sigmas": getattr(args, "sigmas", None),
        "bisect_lo": getattr(args, "lo", None),
        "bisect_hi": getattr(args, "hi", None),
        "width_tol": getattr(args, "width_tol", None),
    }
    try:
        if args.command == "verify":
            if args.config is not None:
                load_config(args.config, overrides)  # reject invalid configs early
            return cmd_verify(args.only, args.quiet)
        cfg = load_config(args.config, overrides)
        if args.command == "run":
            return cmd_run(cfg, args.quiet)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.quiet)
        if args.command == "bisect":
            return cmd_bisect(cfg, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except MonotonicityError as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # invalid brackets, rejected profiles, and similar contract errors
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
