"""Flat ``key = value`` experiment configuration.

Lines look like ``gamma = 2``; ``#`` starts a comment. ``gamma`` and
``lambda`` accept comma-separated lists, which turns a run into a sweep over
their Cartesian product. Initial data is chosen with ``initial_data.kind``
and parameterized by further ``initial_data.*`` keys.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import euler
from .barenblatt import profile_from_mass
from .gas import DampingLaw, DomainError, GasLaw, Grid

MODES = ("run", "pme", "barenblatt", "rates", "validate")
KINDS = ("barenblatt", "perturbed_barenblatt", "two_bumps", "riemann", "table")
BOUNDARIES = ("reflective", "periodic")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _bool(key, text):
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(key, f"expected true or false, got {text!r}")


def _floats(key, text):
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(p == "" for p in parts):
        raise ConfigError(key, f"expected a comma-separated list of numbers, got {text!r}")
    return tuple(_float(key, p) for p in parts)


def _str(key, text):
    return text


def _phase(key, text):
    return "random" if text == "random" else _float(key, text)


def _opt_float(key, text):
    return None if text == "none" else _float(key, text)


# key -> (parser, attribute name)
_TOP = {
    "mode": (_str, "mode"),
    "gamma": (_floats, "gamma"),
    "lambda": (_floats, "lam"),
    "mass": (_opt_float, "mass"),
    "cells": (_int, "cells"),
    "domain_half_width_factor": (_float, "domain_half_width_factor"),
    "domain_half_width": (_opt_float, "domain_half_width"),
    "cfl": (_float, "cfl"),
    "t_end": (_float, "t_end"),
    "snapshot_ratio": (_float, "snapshot_ratio"),
    "dry_threshold": (_float, "dry_threshold"),
    "boundary": (_str, "boundary"),
    "track_entropy": (_bool, "track_entropy"),
    "output_dir": (_str, "output_dir"),
    "seed": (_int, "seed"),
    "workers": (_int, "workers"),
}

_INITIAL = {
    "kind": _str,
    "t0": _float,
    "amplitude": _float,
    "wavelength": _opt_float,
    "phase": _phase,
    "darcy": _bool,
    "centers": _floats,
    "widths": _floats,
    "heights": _floats,
    "rho_left": _float,
    "u_left": _float,
    "rho_right": _float,
    "u_right": _float,
    "x_split": _float,
    "file": _str,
}

# initial_data keys each kind accepts
_KIND_KEYS = {
    "barenblatt": {"t0"},
    "perturbed_barenblatt": {"t0", "amplitude", "wavelength", "phase", "darcy"},
    "two_bumps": {"centers", "widths", "heights"},
    "riemann": {"rho_left", "u_left", "rho_right", "u_right", "x_split"},
    "table": {"file"},
}

_INITIAL_DEFAULTS = {
    "barenblatt": {"t0": 0.0},
    "perturbed_barenblatt": {"t0": 1.0, "amplitude": 0.3, "wavelength": None,
                             "phase": 0.0, "darcy": False},
    "two_bumps": {"centers": (-0.6, 0.6), "widths": (0.4, 0.4), "heights": (1.0, 0.5)},
    "riemann": {"x_split": 0.0},
    "table": {},
}


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: tuple
    lam: tuple
    t_end: float
    mass: Optional[float] = None
    initial_data: dict = field(default_factory=dict)
    mode: str = "run"
    cells: int = 2000
    domain_half_width_factor: float = 1.5
    domain_half_width: Optional[float] = None
    cfl: float = 0.45
    snapshot_ratio: float = 1.3
    dry_threshold: float = 1e-12
    boundary: str = "reflective"
    track_entropy: bool = False
    output_dir: str = "output"
    seed: int = 0
    workers: int = 1

    @property
    def kind(self) -> str:
        return self.initial_data["kind"]

    def cells_of_sweep(self):
        """(gamma, lambda) pairs in a fixed order."""
        return [(g, l) for g in self.gamma for l in self.lam]

    @property
    def is_sweep(self) -> bool:
        return len(self.gamma) * len(self.lam) > 1

    def initial_data_for(self, gas: GasLaw, damping: DampingLaw, index: int = 0):
        d = self.initial_data
        kind = d["kind"]
        if kind == "barenblatt":
            return euler.BarenblattAt(self.mass, d["t0"])
        if kind == "perturbed_barenblatt":
            phase = d["phase"]
            if phase == "random":
                rng = np.random.default_rng([self.seed, index])
                phase = float(rng.uniform(0.0, 2.0 * np.pi))
            return euler.PerturbedBarenblatt(self.mass, d["t0"], d["amplitude"],
                                             d["wavelength"], phase, d["darcy"])
        if kind == "two_bumps":
            return euler.TwoBumps(d["centers"], d["widths"], d["heights"])
        if kind == "riemann":
            return euler.Riemann(d["rho_left"], d["u_left"], d["rho_right"], d["u_right"],
                                 d["x_split"])
        return _read_table(d["file"])

    def solver_config(self, gamma: float, lam: float, index: int = 0) -> euler.SolverConfig:
        gas, damping = GasLaw(gamma), DampingLaw(lam)
        data = self.initial_data_for(gas, damping, index)
        half = self.domain_half_width
        if half is None:
            half = self.domain_half_width_factor * self._reference_radius(gas, damping, data) \
                + data.extent(gas, damping)
        grid = Grid.symmetric(half, self.cells)
        t_start = getattr(data, "t0", 0.0)
        times = euler.geometric_times(t_start, self.t_end, self.snapshot_ratio)
        return euler.SolverConfig(gas, damping, grid, self.t_end, data, cfl=self.cfl,
                                  output_times=times, dry_threshold=self.dry_threshold,
                                  boundary=self.boundary, track_entropy=self.track_entropy)

    def _reference_radius(self, gas, damping, data) -> float:
        """Support radius at t_end of the profile carrying the initial mass."""
        mass = self.mass
        if mass is None:
            half = data.extent(gas, damping)
            probe = Grid.symmetric(half, 4096)
            mass = float(np.sum(data.build(gas, damping, probe).rho) * probe.dx)
        return profile_from_mass(gas, damping, mass).support_radius(self.t_end)

    def to_text(self) -> str:
        """Resolved configuration; ``parse_config`` reads it back to an equal object."""
        lines = []
        for key, (_, attr) in _TOP.items():
            lines.append(f"{key} = {_format(getattr(self, attr))}")
        for key in sorted(self.initial_data):
            lines.append(f"initial_data.{key} = {_format(self.initial_data[key])}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def _read_table(path: str):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    except OSError as exc:
        raise ConfigError("initial_data.file", f"cannot read {path}: {exc}") from None
    if rows and rows[0][:3] == ["x", "rho", "mom"]:
        rows = rows[1:]
    try:
        data = np.array([[float(v) for v in r[:3]] for r in rows])
    except ValueError as exc:
        raise ConfigError("initial_data.file", f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[0] < 2:
        raise ConfigError("initial_data.file", f"{path}: need at least two rows of x, rho, mom")
    return euler.Table(tuple(data[:, 0]), tuple(data[:, 1]), tuple(data[:, 2]))


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    initial = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("initial_data."):
            sub = key[len("initial_data."):]
            if sub not in _INITIAL:
                raise ConfigError(key, "unknown key")
            if sub in initial:
                raise ConfigError(key, "given more than once")
            initial[sub] = _INITIAL[sub](key, value)
        elif key in _TOP:
            parser, attr = _TOP[key]
            if attr in values:
                raise ConfigError(key, "given more than once")
            values[attr] = parser(key, value)
        else:
            raise ConfigError(key, "unknown key")

    for key, attr in (("gamma", "gamma"), ("lambda", "lam"), ("t_end", "t_end")):
        if attr not in values:
            raise ConfigError(key, "required key is missing")
    if "kind" not in initial:
        if values.get("mass") is None:
            raise ConfigError("mass", "required key is missing (give mass or initial_data.kind)")
        initial["kind"] = "barenblatt"
    _check_initial(initial, values.get("mass"))
    cfg = ExperimentConfig(initial_data=initial, **values)
    _check_ranges(cfg)
    return cfg


def _check_initial(initial: dict, mass):
    kind = initial["kind"]
    if kind not in KINDS:
        raise ConfigError("initial_data.kind", f"expected one of {', '.join(KINDS)}, got {kind!r}")
    extra = set(initial) - _KIND_KEYS[kind] - {"kind"}
    if extra:
        key = sorted(extra)[0]
        raise ConfigError(f"initial_data.{key}", f"not used by initial_data.kind = {kind}")
    for key, value in _INITIAL_DEFAULTS[kind].items():
        initial.setdefault(key, value)
    missing = _KIND_KEYS[kind] - set(initial)
    if missing:
        raise ConfigError(f"initial_data.{sorted(missing)[0]}", "required key is missing")
    if kind in ("barenblatt", "perturbed_barenblatt"):
        if mass is None:
            raise ConfigError("mass", f"required key is missing for initial_data.kind = {kind}")
    elif mass is not None:
        raise ConfigError("mass", f"not used by initial_data.kind = {kind}")
    if kind == "two_bumps":
        n = {len(initial[k]) for k in ("centers", "widths", "heights")}
        if len(n) != 1:
            raise ConfigError("initial_data.centers", "centers, widths and heights need equal length")


def _check_ranges(cfg: ExperimentConfig):
    for g in cfg.gamma:
        try:
            GasLaw(g)
        except DomainError as exc:
            raise ConfigError("gamma", str(exc)) from None
    for lam in cfg.lam:
        try:
            DampingLaw(lam)
        except DomainError as exc:
            raise ConfigError("lambda", str(exc)) from None
    if cfg.mode not in MODES:
        raise ConfigError("mode", f"expected one of {', '.join(MODES)}, got {cfg.mode!r}")
    if cfg.mass is not None and not cfg.mass > 0:
        raise ConfigError("mass", f"must be positive, got {cfg.mass}")
    if not cfg.t_end > 0:
        raise ConfigError("t_end", f"must be positive, got {cfg.t_end}")
    if not 0 < cfg.cfl < 1:
        raise ConfigError("cfl", f"must lie in (0, 1), got {cfg.cfl}")
    if cfg.cells < 2:
        raise ConfigError("cells", f"need at least 2, got {cfg.cells}")
    if not cfg.snapshot_ratio > 1:
        raise ConfigError("snapshot_ratio", f"must exceed 1, got {cfg.snapshot_ratio}")
    if not cfg.domain_half_width_factor > 0:
        raise ConfigError("domain_half_width_factor", "must be positive")
    if cfg.domain_half_width is not None and not cfg.domain_half_width > 0:
        raise ConfigError("domain_half_width", "must be positive")
    if cfg.dry_threshold < 0:
        raise ConfigError("dry_threshold", "must be nonnegative")
    if cfg.boundary not in BOUNDARIES:
        raise ConfigError("boundary", f"expected one of {', '.join(BOUNDARIES)}")
    if cfg.workers < 1:
        raise ConfigError("workers", "need at least 1")
    if cfg.kind == "riemann" and cfg.domain_half_width is None:
        raise ConfigError("domain_half_width", "required for initial_data.kind = riemann")
    t0 = cfg.initial_data.get("t0", 0.0)
    if not 0 <= t0 < cfg.t_end:
        raise ConfigError("initial_data.t0", f"must lie in [0, t_end), got {t0}")


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    return parse_config(text)


__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config"]
