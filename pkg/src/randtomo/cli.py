"""Command-line entry point: batch experiments with CSV (and SVG) output.

Subcommands
-----------
haar-scaling   mean log(kappa) of Haar ensembles vs. the asymptotic law
time-trace     log(kappa) traces under random control fields
dist-check     KS tests of tomography-matrix entry distributions
control-check  Lie-closure controllability dimensions
reconstruct    noisy-reconstruction error vs. the condition-number bound

Configuration comes from defaults < JSON file (--config) < explicit flags.
Unknown JSON keys are rejected. Output CSVs are bit-reproducible for a
fixed (config, seed), independent of --threads.

Exit codes: 0 ok, 1 configuration error, 2 numeric failure, 3 failed
plateau/KS/controllability gate when --check is given.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import ensembles as ens
from .bases import GELL_MANN, PAULI_PRODUCT
from .controllability import lie_closure_dimension
from .distributions import expected_logkappa_haar
from .dynamics import ising_system, multilevel_system
from .errors import ConfigError, PlateauNotFoundError, RandtomoError
from .svgplot import line_plot

DESK_SCALE_MAX_DIM = 16
DESK_SCALE_MAX_SPINS = 4


@dataclass
class ExperimentConfig:
    """All tunables; subcommands validate and use the fields they need."""

    seed: int = 0
    stream: int = 0
    threads: int = 1
    out_dir: str = "out"
    large: bool = False
    # haar-scaling
    dims: list[int] = field(default_factory=lambda: [2, 4, 8, 16])
    basis: str = "both"  # gellmann | pauli-product | both
    n_trials: int = 1000
    # time-trace
    system: str = "multilevel"  # multilevel | ising
    sizes: list[int] | None = None  # d values (multilevel) or N values (ising)
    h: float = 1.0
    g: float | None = None  # default 10 h
    dt: float | None = None  # default 0.1/h multilevel, 0.01/h ising
    field_kind: str = "piecewise"  # piecewise | fourier
    fourier_terms: int = 20
    omega_max: float | None = None  # default g
    t_final: float | None = None  # default 16/h multilevel, 12/h ising
    n_times: int = 32
    time_grid: str = "linear"  # linear | log
    t_min: float | None = None
    n_realizations: int = 100
    trajectory: bool = False
    # dist-check
    dist_cases: list[dict] | None = None
    # control-check
    spins: list[int] = field(default_factory=lambda: [2, 3])
    max_depth: int = 16
    # reconstruct
    recon_dim: int = 4
    noise_levels: list[float] = field(default_factory=lambda: [0.0, 0.01, 0.02, 0.04, 0.08])
    recon_trials: int = 200


_CFG_KEYS = {f.name for f in fields(ExperimentConfig)}
_CASE_KEYS = {"kind", "n", "dim", "spins", "n_samples", "alpha"}


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    cfg = ExperimentConfig()
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for source in (data, overrides):
        for key, value in source.items():
            if value is None:
                continue
            if key not in _CFG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if not (0 <= cfg.seed < 2**64) or not (0 <= cfg.stream < 2**64):
        raise ConfigError("seed/stream must be unsigned 64-bit integers")
    if cfg.basis not in (GELL_MANN, PAULI_PRODUCT, "both"):
        raise ConfigError(f"unknown basis {cfg.basis!r}")
    if cfg.system not in ("multilevel", "ising"):
        raise ConfigError(f"unknown system {cfg.system!r}")
    if cfg.field_kind not in ("piecewise", "fourier"):
        raise ConfigError(f"unknown field kind {cfg.field_kind!r}")
    if cfg.time_grid not in ("linear", "log"):
        raise ConfigError(f"unknown time grid {cfg.time_grid!r}")
    for name in ("h", "g", "dt", "omega_max", "t_final", "t_min"):
        v = getattr(cfg, name)
        if v is not None and not v > 0:
            raise ConfigError(f"{name} must be positive, got {v!r}")
    if cfg.n_trials < 1 or cfg.n_realizations < 1 or cfg.recon_trials < 1:
        raise ConfigError("trial/realization counts must be >= 1")
    if cfg.n_times < 2:
        raise ConfigError("need at least two sample times")
    if any(s < 0 for s in cfg.noise_levels):
        raise ConfigError("noise levels must be non-negative")
    if cfg.dist_cases is not None:
        for case in cfg.dist_cases:
            unknown = set(case) - _CASE_KEYS
            if unknown:
                raise ConfigError(f"unknown dist_cases keys {sorted(unknown)}")


def _check_desk_scale(cfg: ExperimentConfig, dims=(), spins=()) -> None:
    if cfg.large:
        return
    too_big = [d for d in dims if d > DESK_SCALE_MAX_DIM]
    too_many = [n for n in spins if n > DESK_SCALE_MAX_SPINS]
    if too_big or too_many:
        raise ConfigError(
            f"sizes {too_big + too_many} exceed the desk-scale caps "
            f"(d <= {DESK_SCALE_MAX_DIM}, N <= {DESK_SCALE_MAX_SPINS}); pass --large to override"
        )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


# ---------------------------------------------------------------------------
# subcommand drivers

def _cmd_haar_scaling(cfg: ExperimentConfig, out: Path) -> int:
    _check_desk_scale(cfg, dims=cfg.dims)
    kinds = [GELL_MANN, PAULI_PRODUCT] if cfg.basis == "both" else [cfg.basis]
    rows = ens.run_haar_scaling(
        cfg.dims, kinds, cfg.n_trials, cfg.seed, cfg.stream, workers=cfg.threads
    )
    write_csv(
        out / "haar_scaling.csv",
        ["basis", "d", "n_trials", "n_excluded", "mean_logkappa", "stderr",
         "log_mean_kappa", "prediction", "deviation"],
        rows,
    )
    return 0


def _time_grid(cfg: ExperimentConfig, t_final: float) -> tuple[float, ...]:
    if cfg.time_grid == "linear":
        return tuple(np.linspace(t_final / cfg.n_times, t_final, cfg.n_times))
    t_min = cfg.t_min if cfg.t_min is not None else t_final / 100.0
    return tuple(np.geomspace(t_min, t_final, cfg.n_times))


def _trace_specs(cfg: ExperimentConfig) -> list[ens.TimeTraceSpec]:
    if cfg.system == "multilevel":
        sizes = cfg.sizes if cfg.sizes is not None else [4]
        _check_desk_scale(cfg, dims=sizes)
        dt0, tf0 = 0.1 / cfg.h, 16.0 / cfg.h
    else:
        sizes = cfg.sizes if cfg.sizes is not None else [2]
        _check_desk_scale(cfg, spins=sizes)
        dt0, tf0 = 0.01 / cfg.h, 12.0 / cfg.h
    g = cfg.g if cfg.g is not None else 10.0 * cfg.h
    dt = cfg.dt if cfg.dt is not None else dt0
    t_final = cfg.t_final if cfg.t_final is not None else tf0
    omega = cfg.omega_max if cfg.omega_max is not None else g
    times = _time_grid(cfg, t_final)
    return [
        ens.TimeTraceSpec(
            system=cfg.system, size=s, h=cfg.h, g=g, dt=dt, field=cfg.field_kind,
            fourier_terms=cfg.fourier_terms, omega_max=omega, times=times,
            trajectory=cfg.trajectory, seed=cfg.seed, stream=cfg.stream,
        )
        for s in sizes
    ]


def _cmd_time_trace(cfg: ExperimentConfig, out: Path, svg: bool, check: bool) -> int:
    specs = _trace_specs(cfg)
    rows = []
    results = []
    for spec in specs:
        res = ens.run_time_trace(spec, cfg.n_realizations, workers=cfg.threads)
        results.append((spec, res))
        for i, t in enumerate(res.times):
            rows.append(
                {
                    "system": spec.system,
                    "field": spec.field,
                    "mode": "trajectory" if spec.trajectory else "independent",
                    "size": spec.size,
                    "dim": spec.dim,
                    "time": float(t),
                    "mean_logkappa": float(res.mean_logkappa[i]),
                    "std_error": float(res.std_error[i]),
                    "log_mean_kappa": float(res.log_mean_kappa[i]),
                    "n_finite": int(res.n_finite[i]),
                    "n_excluded": int(res.n_excluded[i]),
                }
            )
    write_csv(
        out / "time_trace.csv",
        ["system", "field", "mode", "size", "dim", "time", "mean_logkappa",
         "std_error", "log_mean_kappa", "n_finite", "n_excluded"],
        rows,
    )
    if svg:
        series = [
            (f"{spec.system} size={spec.size}", list(res.times), list(res.mean_logkappa))
            for spec, res in results
        ]
        hlines = [
            (f"asymptote d={spec.dim}", expected_logkappa_haar(spec.dim))
            for spec, _ in results
        ]
        svg_text = line_plot(
            series, hlines, title="mean log kappa vs control time",
            xlabel="t (units of 1/h)", ylabel="mean log kappa",
        )
        (out / "time_trace.svg").write_text(svg_text)
    if check:
        for spec, res in results:
            try:
                est = ens.plateau_estimate(res)
            except PlateauNotFoundError as exc:
                print(f"check failed: no plateau for {spec.system} size={spec.size}: {exc}",
                      file=sys.stderr)
                return 3
            print(f"plateau {spec.system} size={spec.size}: t_p={est.t_p:g} "
                  f"slope_ratio={est.slope_ratio:.3f}")
    return 0


def _cmd_dist_check(cfg: ExperimentConfig, out: Path, check: bool) -> int:
    raw = cfg.dist_cases if cfg.dist_cases is not None else [
        {"kind": "case2", "spins": 3},
        {"kind": "case1", "n": 1, "dim": 32},
        {"kind": "negative"},
    ]
    cases = [ens.DistCheckCase(**case) for case in raw]
    rows = ens.run_distribution_check(cases, cfg.seed, cfg.stream)
    write_csv(
        out / "dist_check.csv",
        ["test", "n_samples", "alpha", "statistic", "critical", "passed"],
        rows,
    )
    if check and not all(r["passed"] for r in rows):
        failed = [r["test"] for r in rows if not r["passed"]]
        print(f"check failed: {failed}", file=sys.stderr)
        return 3
    return 0


def _cmd_control_check(cfg: ExperimentConfig, out: Path, check: bool) -> int:
    _check_desk_scale(cfg, dims=cfg.dims, spins=cfg.spins)
    g = cfg.g if cfg.g is not None else 10.0 * cfg.h
    rows = []
    for d in cfg.dims:
        res = lie_closure_dimension(multilevel_system(d, cfg.h, g), max_depth=cfg.max_depth)
        rows.append(
            {"system": "multilevel", "size": d, "dim": d, "lie_dimension": res.dimension,
             "expected": d * d - 1, "converged": res.converged,
             "generators_used": res.generators_used,
             "passed": res.converged and res.dimension == d * d - 1}
        )
    for n in cfg.spins:
        d = 2**n
        res = lie_closure_dimension(ising_system(n, cfg.h, g), max_depth=cfg.max_depth)
        rows.append(
            {"system": "ising", "size": n, "dim": d, "lie_dimension": res.dimension,
             "expected": d * d - 1, "converged": res.converged,
             "generators_used": res.generators_used,
             "passed": res.converged and res.dimension == d * d - 1}
        )
    write_csv(
        out / "control_check.csv",
        ["system", "size", "dim", "lie_dimension", "expected", "converged",
         "generators_used", "passed"],
        rows,
    )
    if check and not all(r["passed"] for r in rows):
        failed = [(r["system"], r["size"]) for r in rows if not r["passed"]]
        print(f"check failed: not fully controllable: {failed}", file=sys.stderr)
        return 3
    return 0


def _cmd_reconstruct(cfg: ExperimentConfig, out: Path) -> int:
    _check_desk_scale(cfg, dims=[cfg.recon_dim])
    rows = ens.run_reconstruct_demo(
        cfg.recon_dim, cfg.noise_levels, cfg.recon_trials, cfg.seed, cfg.stream,
        workers=cfg.threads,
    )
    write_csv(
        out / "reconstruct.csv",
        ["sigma", "trial", "kappa", "rel_error", "rel_noise", "bound", "ok"],
        rows,
    )
    return 0


# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="base RNG seed (u64)")
    parser.add_argument("--threads", type=int, help="worker processes (default 1)")
    parser.add_argument("--out", help="output directory (default ./out)")
    parser.add_argument("--large", action="store_true", default=None,
                        help="lift the desk-scale size caps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randtomo", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("haar-scaling", help="Haar ensemble scaling of log kappa")
    _add_common(p)
    p.add_argument("--dims", type=int, nargs="+", help="Hilbert-space dimensions")
    p.add_argument("--trials", type=int, dest="n_trials", help="realizations per point")
    p.add_argument("--basis", choices=[GELL_MANN, PAULI_PRODUCT, "both"])

    p = sub.add_parser("time-trace", help="log kappa vs control time")
    _add_common(p)
    p.add_argument("--system", choices=["multilevel", "ising"])
    p.add_argument("--sizes", type=int, nargs="+", help="d values (multilevel) or N values (ising)")
    p.add_argument("--field", dest="field_kind", choices=["piecewise", "fourier"])
    p.add_argument("--t-final", type=float, dest="t_final")
    p.add_argument("--n-times", type=int, dest="n_times")
    p.add_argument("--realizations", type=int, dest="n_realizations")
    p.add_argument("--trajectory", action="store_true", default=None,
                   help="sample unitaries along a single trajectory")
    p.add_argument("--svg", action="store_true", help="emit an SVG plot")
    p.add_argument("--check", action="store_true", help="fail (exit 3) when no plateau is found")

    p = sub.add_parser("dist-check", help="entry-distribution KS tests")
    _add_common(p)
    p.add_argument("--samples", type=int, dest="_samples", help="override n_samples of all cases")
    p.add_argument("--check", action="store_true", help="fail (exit 3) when a KS gate fails")

    p = sub.add_parser("control-check", help="Lie-closure controllability dimensions")
    _add_common(p)
    p.add_argument("--dims", type=int, nargs="+", help="multilevel dimensions")
    p.add_argument("--spins", type=int, nargs="+", help="Ising chain lengths")
    p.add_argument("--check", action="store_true", help="fail (exit 3) unless fully controllable")

    p = sub.add_parser("reconstruct", help="noisy reconstruction vs kappa bound")
    _add_common(p)
    p.add_argument("--dim", type=int, dest="recon_dim")
    p.add_argument("--trials", type=int, dest="recon_trials")
    p.add_argument("--noise", type=float, nargs="+", dest="noise_levels")
    return parser


_OVERRIDE_KEYS = (
    "seed", "threads", "large", "dims", "n_trials", "basis", "system", "sizes",
    "field_kind", "t_final", "n_times", "n_realizations", "trajectory",
    "spins", "recon_dim", "recon_trials", "noise_levels",
)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS if getattr(args, k, None) is not None}
        if getattr(args, "out", None) is not None:
            overrides["out_dir"] = args.out
        cfg = load_config(args.config, overrides)
        if getattr(args, "_samples", None) is not None:
            raw = cfg.dist_cases if cfg.dist_cases is not None else [
                {"kind": "case2", "spins": 3},
                {"kind": "case1", "n": 1, "dim": 32},
                {"kind": "negative"},
            ]
            cfg.dist_cases = [dict(c, n_samples=args._samples) for c in raw]
        out = Path(cfg.out_dir)
        if args.command == "haar-scaling":
            return _cmd_haar_scaling(cfg, out)
        if args.command == "time-trace":
            return _cmd_time_trace(cfg, out, svg=args.svg, check=args.check)
        if args.command == "dist-check":
            return _cmd_dist_check(cfg, out, check=args.check)
        if args.command == "control-check":
            return _cmd_control_check(cfg, out, check=args.check)
        if args.command == "reconstruct":
            return _cmd_reconstruct(cfg, out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (RandtomoError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
