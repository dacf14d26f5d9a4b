"""Shared physical parameters, slit geometry, grids and sampled 1-D fields.

Everything here is an immutable value object; instances can be shared freely
between threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class ValidationError(ValueError):
    """An argument or field violates its documented contract."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


@dataclass(frozen=True)
class PhysicalParams:
    """Effective quantum of action, particle mass and initial packet width.

    The derived constants are the diffusion constant D = hbar_eff / (2 m)
    and the r.m.s. diffusive velocity at emission u0 = D / sigma0.
    """

    hbar_eff: float = 1.0
    mass: float = 1.0
    sigma0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hbar_eff", "mass", "sigma0"):
            value = getattr(self, name)
            _require(np.isfinite(value) and value > 0,
                     f"{name} must be positive and finite, got {value!r}")

    @property
    def diffusion_constant(self) -> float:
        """D = hbar_eff / (2 m)."""
        return self.hbar_eff / (2.0 * self.mass)

    @property
    def u0(self) -> float:
        """u0 = D / sigma0, so u0**2 = D**2 / sigma0**2 exactly."""
        return self.diffusion_constant / self.sigma0


def make_params(hbar_eff: float, mass: float, sigma0: float) -> PhysicalParams:
    """Validate the three base constants and return a parameter set."""
    return PhysicalParams(hbar_eff=hbar_eff, mass=mass, sigma0=sigma0)


@dataclass(frozen=True)
class SlitConfig:
    """Two-slit geometry: mirror-symmetric Gaussian channels at +-(X + v_x t).

    Channel 1 is centred at +(X + v_x t) and drifts with +v_x, channel 2 is
    its exact mirror image.  v_y is the constant forward speed mapping time
    to the screen coordinate y = v_y * t.  phi0 is a common initial phase; it
    cancels in every phase difference and is kept for completeness.
    amplitude_ratio scales channel 2's wave amplitude relative to channel 1
    (1 = equal slits, 0 = slit 2 closed).
    """

    params: PhysicalParams
    X: float = 2.0
    v_x: float = -0.5
    v_y: float = 1.0
    phi0: float = 0.0
    amplitude_ratio: float = 1.0

    def __post_init__(self) -> None:
        _require(np.isfinite(self.X) and self.X > 0,
                 f"X must be positive, got {self.X!r}")
        _require(np.isfinite(self.v_x), f"v_x must be finite, got {self.v_x!r}")
        _require(np.isfinite(self.v_y) and self.v_y > 0,
                 f"v_y must be positive, got {self.v_y!r}")
        _require(np.isfinite(self.phi0), f"phi0 must be finite, got {self.phi0!r}")
        _require(np.isfinite(self.amplitude_ratio) and self.amplitude_ratio >= 0,
                 f"amplitude_ratio must be >= 0, got {self.amplitude_ratio!r}")

    @property
    def k_x(self) -> float:
        """Transverse wavenumber m |v_x| / hbar_eff."""
        return self.params.mass * abs(self.v_x) / self.params.hbar_eff

    def centers(self, t):
        """Channel centres (c1, c2) at time t; c2 is the exact negation of c1."""
        c1 = self.X + self.v_x * t
        return c1, -c1

    @property
    def amplitudes(self) -> tuple[float, float]:
        """Wave amplitudes (a1, a2) applied to the two channels."""
        return 1.0, self.amplitude_ratio


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid with both endpoints included."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        _require(int(self.n_points) == self.n_points and self.n_points >= 2,
                 f"n_points must be an integer >= 2, got {self.n_points!r}")
        _require(np.isfinite(self.x_min) and np.isfinite(self.x_max)
                 and self.x_min < self.x_max,
                 f"need x_min < x_max, got [{self.x_min!r}, {self.x_max!r}]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.x_min, self.x_max, self.n_points)
        pts.setflags(write=False)
        return pts


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid:
    """Validate and build a uniform grid."""
    return Grid(x_min=x_min, x_max=x_max, n_points=n_points)


@dataclass(frozen=True)
class ScalarField:
    """Real field sampled on a grid at a fixed time."""

    grid: Grid
    values: np.ndarray
    time: float

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        _require(values.shape == (self.grid.n_points,),
                 f"values shape {values.shape} does not match grid "
                 f"({self.grid.n_points} points)")
        _require(bool(np.all(np.isfinite(values))), "field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        """Trapezoid integral over the grid."""
        return float(np.trapezoid(self.values, self.grid.points))
