"""INI-style experiment configuration with command-line overrides.

Config files are flat ``key = value`` lines grouped by ``[section]`` headers;
every key has a default, unknown sections or keys are rejected, and any key
can be overridden on the command line as ``--key=value`` (or
``--section.key=value``).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Grid, PhysicalParams, SlitConfig, ValidationError


class ConfigError(ValueError):
    """Config file or override could not be parsed or validated."""


_SCHEMA: dict[str, dict[str, tuple[type, object]]] = {
    "params": {
        "hbar_eff": (float, 1.0),
        "mass": (float, 1.0),
        "sigma0": (float, 1.0),
    },
    "slit": {
        "X": (float, 2.0),
        "v_x": (float, -0.5),
        "v_y": (float, 1.0),
        "phi0": (float, 0.0),
        "amplitude_ratio": (float, 1.0),
    },
    "grid": {
        "x_min": (float, -15.0),
        "x_max": (float, 15.0),
        "n_points": (int, 4096),
    },
    "time": {
        "t0": (float, 0.0),
        "t1": (float, 8.0),
        "n_frames": (int, 16),
    },
    "trajectory": {
        "n_seeds": (int, 40),
        "seed_span_sigmas": (float, 3.0),
        "dt_init": (float, 0.01),
    },
    "cml": {
        "profile": (str, "gaussian"),
        "safety": (float, 0.9),
        "walker_count": (int, 1_000_000),
        "rng_seed": (int, 20120),
    },
    "output": {
        "directory": (str, "out"),
        "formats": (str, "csv,pgm,png"),
    },
}

_KEY_TO_SECTION = {key: section for section, keys in _SCHEMA.items() for key in keys}
_FORMATS = ("csv", "pgm", "png")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description consumed by the pipeline runner."""

    params: PhysicalParams
    slit: SlitConfig
    grid: Grid
    t0: float
    t1: float
    n_frames: int
    n_seeds: int
    seed_span_sigmas: float
    dt_init: float
    cml_profile: str
    cml_safety: float
    walker_count: int
    rng_seed: int
    out_dir: Path
    formats: tuple[str, ...]

    @property
    def frame_times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_frames)


def _parse_value(section: str, key: str, raw: str):
    kind, _ = _SCHEMA[section][key]
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {raw!r}") from exc


def _read_file(path) -> dict[str, dict[str, object]]:
    parser = configparser.ConfigParser(
        delimiters=("=",), interpolation=None, comment_prefixes=("#", ";")
    )
    parser.optionxform = str  # keys are case-sensitive (X vs x_min)
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section {section!r}")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values.setdefault(section, {})[key] = _parse_value(section, key, raw)
    return values


def apply_overrides(values: dict, overrides) -> dict:
    """Fold ``key=value`` / ``section.key=value`` pairs into raw config values."""
    for token in overrides:
        if "=" not in token:
            raise ConfigError(f"override {token!r} is not of the form key=value")
        key, raw = token.split("=", 1)
        key = key.lstrip("-")
        if "." in key:
            section, key = key.split(".", 1)
            if section not in _SCHEMA or key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section + '.' + key!r}")
        elif key in _KEY_TO_SECTION:
            section = _KEY_TO_SECTION[key]
        else:
            raise ConfigError(f"unknown key {key!r}")
        values.setdefault(section, {})[key] = _parse_value(section, key, raw)
    return values


def _build(values: dict) -> ExperimentConfig:
    def get(section, key):
        return values.get(section, {}).get(key, _SCHEMA[section][key][1])

    try:
        params = PhysicalParams(
            hbar_eff=get("params", "hbar_eff"),
            mass=get("params", "mass"),
            sigma0=get("params", "sigma0"),
        )
        slit = SlitConfig(
            params=params,
            X=get("slit", "X"),
            v_x=get("slit", "v_x"),
            v_y=get("slit", "v_y"),
            phi0=get("slit", "phi0"),
            amplitude_ratio=get("slit", "amplitude_ratio"),
        )
        grid = Grid(
            x_min=get("grid", "x_min"),
            x_max=get("grid", "x_max"),
            n_points=get("grid", "n_points"),
        )
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc

    t0, t1 = get("time", "t0"), get("time", "t1")
    n_frames = get("time", "n_frames")
    if not t0 <= t1:
        raise ConfigError(f"need t0 <= t1, got {t0!r} > {t1!r}")
    if n_frames < 1:
        raise ConfigError(f"n_frames must be >= 1, got {n_frames!r}")
    n_seeds = get("trajectory", "n_seeds")
    if n_seeds < 2:
        raise ConfigError(f"n_seeds must be >= 2, got {n_seeds!r}")
    dt_init = get("trajectory", "dt_init")
    if not dt_init > 0:
        raise ConfigError(f"dt_init must be positive, got {dt_init!r}")
    seed_span = get("trajectory", "seed_span_sigmas")
    if not seed_span > 0:
        raise ConfigError(f"seed_span_sigmas must be positive, got {seed_span!r}")
    profile = get("cml", "profile")
    if profile not in ("gaussian", "delta"):
        raise ConfigError(f"profile must be 'gaussian' or 'delta', got {profile!r}")
    safety = get("cml", "safety")
    if not 0 < safety <= 1:
        raise ConfigError(f"safety must be in (0, 1], got {safety!r}")
    walker_count = get("cml", "walker_count")
    if walker_count < 1:
        raise ConfigError(f"walker_count must be >= 1, got {walker_count!r}")
    formats = tuple(
        part.strip() for part in get("output", "formats").split(",") if part.strip()
    )
    for fmt in formats:
        if fmt not in _FORMATS:
            raise ConfigError(f"unknown output format {fmt!r}")

    return ExperimentConfig(
        params=params,
        slit=slit,
        grid=grid,
        t0=t0,
        t1=t1,
        n_frames=n_frames,
        n_seeds=n_seeds,
        seed_span_sigmas=seed_span,
        dt_init=dt_init,
        cml_profile=profile,
        cml_safety=safety,
        walker_count=walker_count,
        rng_seed=get("cml", "rng_seed"),
        out_dir=Path(get("output", "directory")),
        formats=formats,
    )


def load_config(path=None, overrides=()) -> ExperimentConfig:
    """Read a config file (optional), apply overrides, validate everything."""
    values = _read_file(path) if path is not None else {}
    values = apply_overrides(values, overrides)
    return _build(values)


def default_config(**overrides) -> ExperimentConfig:
    """All-defaults config, with keyword overrides as ``key=value`` strings."""
    return load_config(None, [f"{k}={v}" for k, v in overrides.items()])
