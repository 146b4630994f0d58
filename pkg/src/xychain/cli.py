"""Declarative batch runner: YAML configs in, CSV tables and a JSON
manifest out.

Two commands: ``run`` executes a (control x beta) sweep of enhancement
scores; ``selfavg-map`` maps the self-averaging gap over a
(control x sigma) grid.  Rerunning an identical config and seed
reproduces the results table byte for byte at any worker count.  All
energies are in units of the fixed scale (the uniform field for the
spin-glass kind, the uniform coupling for the random-field kind); the
token "inf" in the beta grid selects the ground state.

Exit codes: 0 success, 1 config error, 2 more than 10% of sweep points
failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import yaml

from . import __version__
from .ensemble import OBSERVABLES, derive_seed, self_averaging_gaps
from .model import BOUNDARIES, PERIODIC
from .scores import MODEL_KINDS, SamplingPlan, disordered_problem, sweep

RUN_SCHEMA = "xychain-run-v1"
SELFAVG_SCHEMA = "xychain-selfavg-v1"

RUN_HEADER = ["model_kind", "N", "gamma", "sigma_d", "control", "beta_scaled", "observable",
              "quenched_mean", "quenched_std_error", "ordered_value", "delta", "total_delta",
              "M_used", "error"]
SELFAVG_HEADER = ["model_kind", "N", "gamma", "control", "sigma_d", "beta_scaled", "observable",
                  "site_average", "quenched_average", "gap", "quenched_std_error", "M_used",
                  "error"]

FAILURE_THRESHOLD = 0.10


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    model_kind: str
    n_sites: int
    gamma: float
    sigma: float
    boundary: str
    control_values: tuple[float, ...]
    beta_values: tuple[float, ...]
    observables: tuple[str, ...]
    plan: SamplingPlan
    totals: bool
    master_seed: int
    sigma_values: tuple[float, ...] | None
    results_name: str
    manifest_name: str


def _require(raw: dict, key: str):
    if key not in raw:
        raise ConfigError(key, "missing required field")
    return raw[key]


def _grid_values(raw, field: str) -> tuple[float, ...]:
    if isinstance(raw, (list, tuple)):
        if not raw:
            raise ConfigError(field, "grid list must be nonempty")
        return tuple(float(v) for v in raw)
    if not isinstance(raw, dict):
        raise ConfigError(field, "expected {start, stop, step} or a list of values")
    try:
        start = float(raw["start"])
        stop = float(raw["stop"])
        step = float(raw["step"])
    except KeyError as exc:
        raise ConfigError(f"{field}.{exc.args[0]}", "missing grid field") from None
    if step <= 0:
        raise ConfigError(f"{field}.step", f"step must be > 0, got {step}")
    if stop < start:
        raise ConfigError(f"{field}.stop", "stop must be >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


def _beta_value(entry, field: str) -> float:
    if isinstance(entry, str):
        if entry.strip().lower() in ("inf", "infinity", "ground"):
            return math.inf
        raise ConfigError(field, f"unrecognized beta token {entry!r}")
    value = float(entry)
    if value < 0:
        raise ConfigError(field, f"beta must be >= 0, got {value}")
    return value


def _plan_from(raw) -> SamplingPlan:
    if raw is None:
        return SamplingPlan()
    if not isinstance(raw, dict):
        raise ConfigError("realizations", "expected a mapping")
    if "fixed" in raw:
        n = int(raw["fixed"])
        if n < 2:
            raise ConfigError("realizations.fixed", f"need at least 2 realizations, got {n}")
        return SamplingPlan(mode="fixed", n_realizations=n)
    kwargs = {}
    for key, attr in (("target_std_error", "target_std_error"), ("min", "min_realizations"),
                      ("max", "max_realizations"), ("batch", "batch_size")):
        if key in raw:
            kwargs[attr] = type(getattr(SamplingPlan(), attr))(raw[key])
    plan = SamplingPlan(mode="adaptive", **kwargs)
    if plan.min_realizations < 2:
        raise ConfigError("realizations.min", "need at least 2 realizations")
    if plan.max_realizations < plan.min_realizations:
        raise ConfigError("realizations.max", "max must be >= min")
    if plan.target_std_error <= 0:
        raise ConfigError("realizations.target_std_error", "must be > 0")
    return plan


def build_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping")
    model_kind = str(_require(raw, "model_kind"))
    if model_kind not in MODEL_KINDS:
        raise ConfigError("model_kind", f"must be one of {MODEL_KINDS}, got {model_kind!r}")
    n_sites = int(_require(raw, "n_sites"))
    if n_sites < 2:
        raise ConfigError("n_sites", f"must be >= 2, got {n_sites}")
    gamma = float(_require(raw, "gamma"))
    if gamma == 0:
        raise ConfigError("gamma", "must be nonzero")
    sigma = float(_require(raw, "sigma"))
    if sigma < 0:
        raise ConfigError("sigma", f"must be >= 0, got {sigma}")
    boundary = str(raw.get("boundary", PERIODIC))
    if boundary not in BOUNDARIES:
        raise ConfigError("boundary", f"must be one of {BOUNDARIES}, got {boundary!r}")
    controls = _grid_values(_require(raw, "control_grid"), "control_grid")
    betas_raw = _require(raw, "beta_grid")
    if not isinstance(betas_raw, (list, tuple)) or not betas_raw:
        raise ConfigError("beta_grid", "expected a nonempty list")
    betas = tuple(_beta_value(b, "beta_grid") for b in betas_raw)
    observables = _require(raw, "observables")
    if not isinstance(observables, (list, tuple)) or not observables:
        raise ConfigError("observables", "expected a nonempty list")
    for obs in observables:
        if obs not in OBSERVABLES:
            raise ConfigError("observables", f"unknown observable {obs!r}; expected one of {OBSERVABLES}")
    sigma_values = None
    if raw.get("sigma_grid") is not None:
        sigma_values = _grid_values(raw["sigma_grid"], "sigma_grid")
    output = raw.get("output") or {}
    if not isinstance(output, dict):
        raise ConfigError("output", "expected a mapping")
    return RunConfig(
        model_kind=model_kind,
        n_sites=n_sites,
        gamma=gamma,
        sigma=sigma,
        boundary=boundary,
        control_values=controls,
        beta_values=betas,
        observables=tuple(str(o) for o in observables),
        plan=_plan_from(raw.get("realizations")),
        totals=bool(raw.get("totals", True)),
        master_seed=int(_require(raw, "master_seed")),
        sigma_values=sigma_values,
        results_name=str(output.get("results", "results.csv")),
        manifest_name=str(output.get("manifest", "manifest.json")),
    )


def _jsonable(value):
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def config_digest(config: RunConfig) -> str:
    payload = {
        "model_kind": config.model_kind,
        "n_sites": config.n_sites,
        "gamma": config.gamma,
        "sigma": config.sigma,
        "boundary": config.boundary,
        "control_values": list(config.control_values),
        "beta_values": [_jsonable(b) for b in config.beta_values],
        "observables": list(config.observables),
        "plan": {
            "mode": config.plan.mode,
            "n_realizations": config.plan.n_realizations,
            "target_std_error": config.plan.target_std_error,
            "min_realizations": config.plan.min_realizations,
            "max_realizations": config.plan.max_realizations,
            "batch_size": config.plan.batch_size,
        },
        "totals": config.totals,
        "master_seed": config.master_seed,
        "sigma_values": list(config.sigma_values) if config.sigma_values else None,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(path: Path, config: RunConfig, command: str, schema: str,
                    results_name: str, results_sha: str, n_points: int, n_failed: int,
                    workers: int, wall_time: float) -> None:
    manifest = {
        "tool": "xychain",
        "version": __version__,
        "command": command,
        "results_schema": schema,
        "results": results_name,
        "results_sha256": results_sha,
        "config_sha256": config_digest(config),
        "master_seed": config.master_seed,
        "workers": workers,
        "n_points": n_points,
        "n_failed_points": n_failed,
        "wall_time_seconds": wall_time,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run(config: RunConfig, out_dir: Path, workers: int = 1) -> int:
    """Execute a sweep and write the results table and manifest."""
    t0 = time.monotonic()
    out_dir.mkdir(parents=True, exist_ok=True)
    records = sweep(
        config.model_kind, config.gamma, config.n_sites, config.sigma,
        config.control_values, config.beta_values, config.observables,
        config.master_seed, workers=workers, plan=config.plan,
        totals=config.totals, boundary=config.boundary,
    )
    rows = []
    failed_points = set()
    for rec in records:
        if rec.error is not None:
            failed_points.add((rec.control, rec.beta_scaled))
        rows.append([
            config.model_kind, config.n_sites, config.gamma, config.sigma,
            rec.control, rec.beta_scaled, rec.observable,
            rec.quenched_mean, rec.quenched_std_error, rec.ordered_value,
            rec.delta, rec.total_delta, rec.n_realizations, rec.error,
        ])
    results_path = out_dir / config.results_name
    results_sha = _write_csv(results_path, RUN_HEADER, rows)
    n_points = len(config.control_values) * len(config.beta_values)
    _write_manifest(out_dir / config.manifest_name, config, "run", RUN_SCHEMA,
                    config.results_name, results_sha, n_points, len(failed_points),
                    workers, time.monotonic() - t0)
    if len(failed_points) > FAILURE_THRESHOLD * n_points:
        return 2
    return 0


def selfavg_map(config: RunConfig, out_dir: Path, workers: int = 1) -> int:
    """Self-averaging gap over the (control x sigma) grid, per observable."""
    if config.sigma_values is None:
        raise ConfigError("sigma_grid", "selfavg-map needs a sigma_grid")
    t0 = time.monotonic()
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    failed_points = set()
    n_sigma = len(config.sigma_values)
    n_beta = len(config.beta_values)
    for ic, control in enumerate(config.control_values):
        for isg, sigma in enumerate(config.sigma_values):
            for ib, beta in enumerate(config.beta_values):
                point_index = (ic * n_sigma + isg) * n_beta + ib
                point_seed = derive_seed(config.master_seed, point_index)
                template, dis = disordered_problem(
                    config.model_kind, control, sigma, config.gamma,
                    config.n_sites, config.boundary)
                m = (config.plan.n_realizations if config.plan.mode == "fixed"
                     else config.plan.max_realizations)
                try:
                    gaps, estimates = self_averaging_gaps(template, dis, config.observables,
                                                          beta, m, point_seed, workers)
                except Exception as exc:
                    failed_points.add((control, sigma, beta))
                    for obs in config.observables:
                        rows.append([config.model_kind, config.n_sites, config.gamma,
                                     control, sigma, beta, obs,
                                     None, None, None, None, None, str(exc)])
                    continue
                for obs, gap, est in zip(config.observables, gaps, estimates):
                    rows.append([config.model_kind, config.n_sites, config.gamma,
                                 control, sigma, beta, obs,
                                 gap.site_average, gap.quenched_average, gap.gap,
                                 est.std_error, est.n_realizations, None])
    results_path = out_dir / config.results_name
    results_sha = _write_csv(results_path, SELFAVG_HEADER, rows)
    n_points = len(config.control_values) * n_sigma * n_beta
    _write_manifest(out_dir / config.manifest_name, config, "selfavg_map", SELFAVG_SCHEMA,
                    config.results_name, results_sha, n_points, len(failed_points),
                    workers, time.monotonic() - t0)
    if len(failed_points) > FAILURE_THRESHOLD * n_points:
        return 2
    return 0


def preset_names() -> list[str]:
    files = resources.files("xychain").joinpath("presets")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".yaml"))


def load_preset(name: str) -> dict:
    ref = resources.files("xychain").joinpath("presets").joinpath(f"{name}.yaml")
    if not ref.is_file():
        raise ConfigError("preset", f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return yaml.safe_load(ref.read_text(encoding="utf-8"))


def _load_raw_config(args) -> dict:
    if args.preset and args.config:
        raise ConfigError("config", "give either --config or --preset, not both")
    if args.preset:
        return load_preset(args.preset)
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError("config", f"no such file: {path}")
        try:
            return yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"YAML parse error: {exc}") from exc
    raise ConfigError("config", "one of --config or --preset is required")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a YAML run config")
    parser.add_argument("--preset", help="name of a packaged preset config")
    parser.add_argument("--out-dir", default="out", help="output directory (default: ./out)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for disorder realizations (default 1)")
    parser.add_argument("--seed", type=int, default=None, help="override the config master seed")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="xychain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="sweep enhancement scores over a control x beta grid"))
    _add_common(sub.add_parser("selfavg-map", help="map the self-averaging gap over control x sigma"))
    sub.add_parser("presets", help="list packaged preset configs")
    args = parser.parse_args(argv)

    if args.command == "presets":
        for name in preset_names():
            print(name)
        return 0

    try:
        raw = _load_raw_config(args)
        if args.seed is not None:
            raw = dict(raw, master_seed=args.seed)
        config = build_config(raw)
        if args.command == "run":
            return run(config, Path(args.out_dir), max(1, args.workers))
        return selfavg_map(config, Path(args.out_dir), max(1, args.workers))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
