"""Command-line entry point: ``be-lab run|pme|barenblatt|rates|validate``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import euler
from .barenblatt import profile_from_mass, sample
from .config import ConfigError, ExperimentConfig, load_config
from .gas import DampingLaw, DomainError, GasLaw
from .pme import PmeRun, run_snapshots
from .rates import ConvergenceError, closed_form_rates, fit_decay, iterate_rates

STEP_COLUMNS = ("t", "dt", "max_wave_speed", "mass", "momentum_total", "energy_total")


def fmt(value) -> str:
    return format(float(value) + 0.0, ".17g")


def write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def resolve_output_dir(cfg: ExperimentConfig, override=None) -> Path:
    return Path(override or os.environ.get("BE_OUTPUT_DIR") or cfg.output_dir)


def cell_name(gamma: float, lam: float) -> str:
    return f"gamma_{gamma!r}_lambda_{lam!r}"


def _targets(cfg: ExperimentConfig, out: Path):
    cells = cfg.cells_of_sweep()
    if not cfg.is_sweep:
        return [(0, cells[0][0], cells[0][1], out)]
    return [(i, g, l, out / cell_name(g, l)) for i, (g, l) in enumerate(cells)]


def run_cell(cfg: ExperimentConfig, index: int, gamma: float, lam: float, out: Path) -> dict:
    """Run one (gamma, lambda) cell and write its files; return its manifest entry."""
    solver = cfg.solver_config(gamma, lam, index)
    res = euler.run(solver)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    x = solver.grid.centers()
    snapshots = []
    for k, s in enumerate(res.snapshots):
        name = f"snapshots/snapshot_{k:04d}.csv"
        write_csv(out / name, ("x", "rho", "mom"), zip(x, s.rho, s.mom))
        snapshots.append({"file": name, "t": s.t})
    write_csv(out / "diagnostics.csv", euler.DIAGNOSTIC_COLUMNS,
              ([d[c] for c in euler.DIAGNOSTIC_COLUMNS] for d in res.diagnostics))
    write_csv(out / "steps.csv", STEP_COLUMNS,
              ([getattr(r, c) for c in STEP_COLUMNS] for r in res.records))
    (out / "resolved-config.txt").write_text(cfg.to_text())
    rates = closed_form_rates(gamma, lam)
    entry = {
        "gamma": gamma,
        "lambda": lam,
        "initial_data": repr(solver.initial_data),
        "domain_half_width": -solver.grid.x_left,
        "cells": solver.grid.n_cells,
        "steps": len(res.records),
        "mass_drift": res.mass_drift,
        "w_excess": res.w_excess,
        "z_excess": res.z_excess,
        "mu_tilde": rates.mu_tilde,
        "alpha_tilde": rates.alpha_tilde,
        "files": ["resolved-config.txt", "diagnostics.csv", "steps.csv"]
                 + [s["file"] for s in snapshots],
        "snapshots": snapshots,
    }
    _write_json(out / "manifest.json", entry)
    return entry


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def command_run(cfg: ExperimentConfig, out: Path, workers=None) -> int:
    workers = workers or cfg.workers
    targets = _targets(cfg, out)
    out.mkdir(parents=True, exist_ok=True)
    if workers > 1 and len(targets) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_cell, cfg, *t) for t in targets]
            entries = [f.result() for f in futures]
    else:
        entries = [run_cell(cfg, *t) for t in targets]
    if cfg.is_sweep:
        (out / "resolved-config.txt").write_text(cfg.to_text())
        _write_json(out / "manifest.json", {
            "config": "resolved-config.txt",
            "cells": [dict(e, directory=t[3].name) for e, t in zip(entries, targets)],
        })
    for e in entries:
        print(f"gamma={e['gamma']} lambda={e['lambda']}: {e['steps']} steps, "
              f"mass drift {e['mass_drift']:.3g}")
    return 0


def command_pme(cfg: ExperimentConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for index, gamma, lam, target in _targets(cfg, out):
        solver = cfg.solver_config(gamma, lam, index)
        start = solver.initial_data.build(solver.gas, solver.damping, solver.grid)
        pme = PmeRun(solver.gas, solver.damping, solver.grid, start.rho, start.t)
        profile = profile_from_mass(solver.gas, solver.damping, pme.mass)
        (target / "snapshots").mkdir(parents=True, exist_ok=True)
        x = solver.grid.centers()
        rows, files = [], []
        for k, snap in enumerate(run_snapshots(pme, solver.output_times)):
            exact = profile.cell_averages(solver.grid, snap.t)
            name = f"snapshots/snapshot_{k:04d}.csv"
            write_csv(target / name, ("x", "rho", "rho_exact"), zip(x, snap.rho, exact))
            files.append({"file": name, "t": snap.t})
            rows.append((snap.t, snap.mass, np.sum(np.abs(snap.rho - exact)) * solver.grid.dx))
        write_csv(target / "summary.csv", ("t", "mass", "l1_error"), rows)
        (target / "resolved-config.txt").write_text(cfg.to_text())
        entry = {"gamma": gamma, "lambda": lam, "snapshots": files,
                 "files": ["resolved-config.txt", "summary.csv"] + [f["file"] for f in files]}
        _write_json(target / "manifest.json", entry)
        summary[target.name] = entry
        print(f"gamma={gamma} lambda={lam}: final L1 error {rows[-1][2]:.3g}")
    if cfg.is_sweep:
        _write_json(out / "manifest.json", {"cells": summary})
    return 0


def command_barenblatt(args) -> int:
    profile = profile_from_mass(GasLaw(args.gamma), DampingLaw(args.lam), args.mass)
    if args.samples < 2:
        raise DomainError("need at least 2 samples")
    x, rho, mom = sample(profile, args.time, args.samples, args.half_width)
    if args.output:
        write_csv(Path(args.output), ("x", "rho", "mom"), zip(x, rho, mom))
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(("x", "rho", "mom"))
        for row in zip(x, rho, mom):
            w.writerow([fmt(v) for v in row])
    return 0


def command_rates(args) -> int:
    if args.action == "fit":
        if not args.csv:
            raise DomainError("rates fit needs a diagnostics CSV")
        return _fit_csv(args)
    if args.action is not None:
        raise DomainError(f"unknown rates action {args.action!r}")
    if args.gamma is None or args.lam is None:
        raise DomainError("rates needs --gamma and --lambda")
    closed = closed_form_rates(args.gamma, args.lam)
    it = iterate_rates(args.gamma, args.lam)
    print(f"mu_tilde    = {fmt(closed.mu_tilde)}")
    print(f"alpha_tilde = {fmt(closed.alpha_tilde)}")
    print(f"branch      = {closed.branch}")
    print("guaranteed exponents are mu_tilde - eps and alpha_tilde - eps for any eps > 0")
    print("k,mu_k,theta_k")
    for k, (mu, th) in enumerate(it.iteration_trace, 1):
        print(f"{k},{fmt(mu)},{fmt(th)}")
    return 0


def _fit_csv(args) -> int:
    with open(args.csv, newline="") as fh:
        reader = csv.DictReader(fh)
        if args.column not in (reader.fieldnames or ()):
            raise DomainError(f"column {args.column!r} not in {args.csv}")
        rows = [(float(r["t"]), float(r[args.column])) for r in reader]
    t, v = np.array(rows).T
    window = (args.t_start, args.t_end if args.t_end is not None else float(t.max()))
    fit = fit_decay(t, v, window)
    print(f"slope     = {fmt(fit.slope)}")
    print(f"intercept = {fmt(fit.intercept)}")
    print(f"r_squared = {fmt(fit.r_squared)}")
    print(f"window    = {fmt(fit.window[0])}, {fmt(fit.window[1])}")
    print(f"n_points  = {fit.n_points}")
    return 0


def command_validate(args) -> int:
    from .validation import validate_suite

    ok, results = validate_suite(quick=args.quick, stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    if failed:
        print("failed: " + ", ".join(f"{r.number} ({r.name})" for r in failed))
        return 1
    print(f"all {len(results)} criteria passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="be-lab",
                                description="Damped Euler flows and their Barenblatt asymptotics")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    for name, text in (("run", "run the Euler solver from a config file"),
                       ("pme", "run the porous medium solver from a config file")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("config")
        sp.add_argument("--output-dir")
        if name == "run":
            sp.add_argument("--workers", type=int)

    sp = sub.add_parser("barenblatt", help="sample the closed-form profile as CSV")
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mass", type=float, default=1.0)
    sp.add_argument("--time", type=float, default=0.0)
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--half-width", type=float)
    sp.add_argument("--output")

    sp = sub.add_parser("rates", help="decay exponents, or 'rates fit <csv>' for empirical slopes")
    sp.add_argument("action", nargs="?", choices=["fit"])
    sp.add_argument("csv", nargs="?")
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--column", default="lgp1_gap")
    sp.add_argument("--t-start", type=float, default=0.0)
    sp.add_argument("--t-end", type=float)

    sp = sub.add_parser("validate", help="run the acceptance criteria")
    sp.add_argument("--quick", action="store_true", help="only the sub-minute criteria")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("run", "pme"):
            cfg = load_config(args.config)
            out = resolve_output_dir(cfg, args.output_dir)
            if args.command == "run":
                return command_run(cfg, out, args.workers)
            return command_pme(cfg, out)
        if args.command == "barenblatt":
            return command_barenblatt(args)
        if args.command == "rates":
            return command_rates(args)
        return command_validate(args)
    except (ConfigError, DomainError, ConvergenceError, OSError, euler.SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
