"""Command-line interface.

Subcommands:
  validate   run the invariant checks for one configuration
  evolve     time series of velocity, position, interference displacement
  sweep-ell  fitted tremor amplitude versus topological charge
  limits     closed-form consistency report
  density    real-space probability profiles at t = 0

Every CSV is written UTF-8 with plain newlines, floats as %.17g, via a
temp-write-then-rename so a crash never leaves a partial file, and each
CSV gets a .meta.json sidecar carrying the config hash, grid sizes, and
tolerances (no timestamps: reruns are byte-identical).

Exit codes: 0 success, 1 invariant failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .dirac import ELECTRON_SI, NATURAL_UNITS
from .errors import (
    ConfigError,
    DomainError,
    GridConvergenceError,
    NumericalFailure,
    RegimeError,
    UnderresolvedSeriesError,
)
from .observables import (
    drift_velocity,
    fit_zbw,
    interference_displacement_series,
    position_series,
    sweep_enhancement,
    time_grid,
    velocity_series,
)
from .packet import NR_MOMENTUM_BOUND
from .quadrature import build_grid
from .state import decompose

__all__ = ["main"]


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(v)


def _write_csv(path: str, header, rows) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _sidecar_path(csv_path: str) -> str:
    base, _ = os.path.splitext(csv_path)
    return base + ".meta.json"


def _write_sidecar(csv_path: str, meta: dict) -> None:
    path = _sidecar_path(csv_path)
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(json.dumps(meta, sort_keys=True, indent=2))
            fh.write("\n")
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _unit_echo(cfg: RunConfig) -> dict:
    sys_ = NATURAL_UNITS if cfg.units == "natural" else ELECTRON_SI
    return {"name": sys_.name, "hbar": sys_.hbar, "mass": sys_.mass, "c": sys_.c}


def _meta(cfg: RunConfig, command: str, columns, **extra) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "config_sha256": cfg.content_hash(),
        "columns": list(columns),
        "units": _unit_echo(cfg),
        "tolerances": {
            "eps_trunc": cfg.eps_trunc,
            "eps_conv": cfg.eps_conv,
            "fit_tol": cfg.fit_tol,
        },
    }
    meta.update(extra)
    return meta


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _build_state(cfg: RunConfig):
    params = cfg.to_params()
    grid = build_grid(
        params, eps_trunc=cfg.eps_trunc, eps_conv=cfg.eps_conv, t_max=cfg.t_max
    )
    return params, grid, decompose(params, grid)


def _grid_meta(grid) -> dict:
    return {"n_perp": int(grid.n_perp), "n_z": int(grid.n_z)}


def cmd_validate(cfg: RunConfig) -> int:
    from .packet import momentum_longitudinal_magnitude, momentum_radial_profile
    from .observables import velocity_expectation, position_expectation
    from .realspace import analytic_realspace_norm

    params, grid, state = _build_state(cfg)
    checks = []

    norm0 = state.norm_at(0.0)
    checks.append(("momentum_norm", abs(norm0 - 1.0), cfg.eps_trunc, "hard"))

    rad = momentum_radial_profile(params, grid.kp)
    lon = momentum_longitudinal_magnitude(params, grid.kz)
    phi2 = (rad[:, None] * lon[None, :]) ** 2
    comps0 = state.momentum_components(0.0)
    recomb = float(np.max(np.abs(np.sum(np.real(comps0) ** 2, axis=0) - phi2)))
    checks.append(("energy_sector_recombination", recomb / max(float(np.max(phi2)), 1e-300), 1e-12, "hard"))

    norm_excursion = float(
        np.max(np.abs([state.norm_at(t) - norm0 for t in np.linspace(0.0, cfg.t_max, 9)]))
    )
    checks.append(("norm_conservation", norm_excursion, 1e-10, "hard"))

    v0 = velocity_expectation(state, 0.0)
    checks.append(("initial_velocity", abs(float(v0[2])), 1e-12 * max(1.0, abs(drift_velocity(state))), "hard"))

    r0 = position_expectation(state, 0.0)
    checks.append(("initial_position", abs(float(r0[2]) - params.z0), 1e-10 * max(1.0, abs(params.z0)), "hard"))

    trans, lon_norm = analytic_realspace_norm(params)
    checks.append(("realspace_transverse_norm", abs(trans - 1.0), 1e-8, "hard"))
    checks.append(("realspace_longitudinal_norm", abs(lon_norm - 1.0), 1e-8, "hard"))

    checks.append(("nonrelativistic_regime", params.characteristic_momentum, NR_MOMENTUM_BOUND, "soft"))
    checks.append(("negative_energy_fraction", state.negative_energy_fraction, 0.05, "soft"))

    rows = []
    failed = False
    for name, residual, tol, kind in checks:
        if residual <= tol:
            status = "pass"
        elif kind == "soft":
            status = "warn"
        else:
            status = "fail"
            failed = True
        rows.append((name, status, float(residual), float(tol)))

    path = _out_path(cfg, "validate.csv")
    _write_csv(path, ("check", "status", "residual", "tolerance"), rows)
    _write_sidecar(path, _meta(cfg, "validate", ("check", "status", "residual", "tolerance"), grid=_grid_meta(grid)))
    for name, status, residual, tol in rows:
        print(f"{name:32s} {status:5s} residual={residual:.3e} tol={tol:.3e}")
    print(f"wrote {path}")
    return 1 if failed else 0


def cmd_evolve(cfg: RunConfig) -> int:
    params, grid, state = _build_state(cfg)
    times = time_grid(cfg.t_max, cfg.n_samples)

    vel = velocity_series(state, times)
    pos = position_series(state, times)
    disp = interference_displacement_series(state, times)
    fit = fit_zbw(disp, fit_tol=cfg.fit_tol)

    meta_common = dict(
        grid=_grid_meta(grid),
        drift_velocity=drift_velocity(state),
        negative_energy_fraction=state.negative_energy_fraction,
        characteristic_momentum=params.characteristic_momentum,
        regime_ok=bool(params.characteristic_momentum <= NR_MOMENTUM_BOUND),
    )

    path = _out_path(cfg, "velocity.csv")
    _write_csv(path, ("t", "vx", "vy", "vz"),
               [(float(t),) + tuple(float(x) for x in row) for t, row in zip(vel.times, vel.values)])
    _write_sidecar(path, _meta(cfg, "evolve", ("t", "vx", "vy", "vz"), **meta_common))

    path = _out_path(cfg, "position.csv")
    _write_csv(path, ("t", "x", "y", "z"),
               [(float(t),) + tuple(float(x) for x in row) for t, row in zip(pos.times, pos.values)])
    _write_sidecar(path, _meta(cfg, "evolve", ("t", "x", "y", "z"), **meta_common))

    path = _out_path(cfg, "interference.csv")
    _write_csv(path, ("t", "displacement"),
               [(float(t), float(v)) for t, v in zip(disp.times, disp.values)])
    _write_sidecar(path, _meta(cfg, "evolve", ("t", "displacement"), **meta_common))

    tau = fit.envelope_decay_time if fit.envelope_decay_time is not None else math.inf
    path = _out_path(cfg, "fit.csv")
    _write_csv(
        path,
        ("amplitude", "angular_frequency", "phase", "envelope_decay_time", "rms_residual"),
        [(fit.amplitude, fit.angular_frequency, fit.phase, tau, fit.rms_residual)],
    )
    _write_sidecar(path, _meta(
        cfg, "evolve",
        ("amplitude", "angular_frequency", "phase", "envelope_decay_time", "rms_residual"),
        fitted_series="interference_displacement", **meta_common,
    ))

    print(f"drift velocity {drift_velocity(state):.6g}, "
          f"fitted amplitude {fit.amplitude:.6g}, "
          f"fitted frequency {fit.angular_frequency:.6g}")
    print(f"wrote velocity.csv position.csv interference.csv fit.csv under {cfg.out_dir}")
    return 0


def cmd_sweep_ell(cfg: RunConfig) -> int:
    from .observables import loglog_slope

    base = cfg.to_params()
    rows = sweep_enhancement(
        cfg.sweep_ell,
        base,
        allow_relativistic=True,
        t_max=cfg.t_max,
        n_samples=cfg.n_samples,
        eps_trunc=cfg.eps_trunc,
        eps_conv=cfg.eps_conv,
        fit_tol=cfg.fit_tol,
    )
    path = _out_path(cfg, "sweep.csv")
    _write_csv(
        path,
        ("ell", "amplitude", "ratio_to_ell0", "predicted_sqrt_ell", "gamma_ratio_prediction"),
        [(r.ell, r.amplitude, r.ratio_to_ell0, r.predicted_sqrt_ell, r.gamma_ratio_prediction)
         for r in rows],
    )
    positive = [(r.ell, r.amplitude) for r in rows if r.ell > 0]
    slope = None
    if len(positive) >= 2:
        slope = loglog_slope([e for e, _ in positive], [a for _, a in positive])
    regime = [
        {
            "ell": r.ell,
            "max_momentum_scale": r.max_momentum_scale,
            "negative_energy_fraction": r.negative_energy_fraction,
            "regime_ok": bool(r.regime_ok),
        }
        for r in rows
    ]
    _write_sidecar(path, _meta(
        cfg, "sweep-ell",
        ("ell", "amplitude", "ratio_to_ell0", "predicted_sqrt_ell", "gamma_ratio_prediction"),
        loglog_slope=slope, regime=regime,
    ))
    for r in rows:
        flag = "" if r.regime_ok else "  [out of regime]"
        print(f"ell={r.ell:4d} amplitude={r.amplitude:.6g} ratio={r.ratio_to_ell0:.4f}{flag}")
    if slope is not None:
        print(f"log-log slope over ell>0 rows: {slope:.4f}")
    print(f"wrote {path}")
    return 0


def cmd_limits(cfg: RunConfig) -> int:
    from .analytic import run_consistency_report

    report = run_consistency_report()
    header = ("claim", "case", "description", "reference", "computed", "rel_deviation", "verdict", "note")
    path = _out_path(cfg, "report.csv")
    _write_csv(path, header, [
        (r.claim_id, r.case, r.description, r.reference_value, r.computed_value,
         r.rel_deviation, r.verdict, r.note)
        for r in report.rows
    ])
    _write_sidecar(path, _meta(cfg, "limits", header, claims=list(report.claim_ids)))

    print(f"{'claim':34s} {'case':30s} {'verdict':26s} rel_deviation")
    for r in report.rows:
        print(f"{r.claim_id:34s} {r.case:30s} {r.verdict:26s} {r.rel_deviation:.3e}")
    counts = {}
    for r in report.rows:
        counts[r.verdict] = counts.get(r.verdict, 0) + 1
    print("; ".join(f"{k}: {v}" for k, v in sorted(counts.items())))
    print(f"wrote {path}")
    return 0


def cmd_density(cfg: RunConfig) -> int:
    from .realspace import density_profile, prepare_reconstruction

    params = cfg.to_params()
    ctx = prepare_reconstruction(
        params, t_max=0.0, eps_trunc=cfg.eps_trunc, eps_conv=cfg.eps_conv
    )
    prof = density_profile(ctx.field_at(0.0))

    grid_meta = {
        "n_perp": int(ctx.state.grid.n_perp),
        "n_z": int(ctx.state.grid.n_z),
        "n_r": int(ctx.cyl.n_r),
        "n_z_real": int(ctx.cyl.n_z),
    }
    path = _out_path(cfg, "density_radial.csv")
    _write_csv(path, ("r", "density", "marginal"),
               list(zip(prof.r, prof.radial_intensity, prof.radial_marginal)))
    _write_sidecar(path, _meta(cfg, "density", ("r", "density", "marginal"), grid=grid_meta))

    path = _out_path(cfg, "density_axial.csv")
    _write_csv(path, ("z", "density"), list(zip(prof.z, prof.longitudinal_marginal)))
    _write_sidecar(path, _meta(cfg, "density", ("z", "density"), grid=grid_meta))

    print(f"wrote density_radial.csv density_axial.csv under {cfg.out_dir}")
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "evolve": cmd_evolve,
    "sweep-ell": cmd_sweep_ell,
    "limits": cmd_limits,
    "density": cmd_density,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vzbw",
        description="Relativistic vortex wave-packet trembling-motion toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", help="path to a key [unit] value config file")
        p.add_argument("--out", help="output directory (overrides the config's out_dir)")
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="accepted for interface compatibility; the computation is sequential",
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.out:
            cfg = replace(cfg, out_dir=args.out)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        return _COMMANDS[args.command](cfg)
    except (ConfigError, RegimeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (GridConvergenceError, DomainError, NumericalFailure, UnderresolvedSeriesError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
