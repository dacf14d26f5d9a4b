"""Two-slit phase, per-channel densities, total intensity and fringe geometry.

The relative phase between the two channels is

    phi(x, t) = 2 m v_x x / hbar - (X + v_x t) x (u0^2 t / sigma^2) / D,

where D = hbar / 2m is the constant diffusion coefficient (not the
time-dependent diffusivity).  The averaged intensity follows the classical
two-wave rule P_tot = P1 + P2 + 2 sqrt(P1 P2) cos phi; with both channels
open and coincident centres its dark nodes sit at x = (n + 1/2) pi / k_x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Grid, ScalarField, SlitConfig, ValidationError
from .dispersion import gaussian_density, packet_variance, slit_packets


def relative_phase(cfg: SlitConfig, x, t):
    """Unreduced phase difference between the two channels (not wrapped)."""
    p = cfg.params
    var = packet_variance(p, t)
    drift_term = 2.0 * p.mass * cfg.v_x * x / p.hbar_eff
    dispersion_rate = p.u0**2 * t / var
    return drift_term - (cfg.X + cfg.v_x * t) * x * dispersion_rate / (
        p.diffusion_constant
    )


def slit_densities(cfg: SlitConfig, x, t):
    """(P1, P2): normalized channel densities of width sigma(t) at +-(X + v_x t)."""
    packet1, packet2 = slit_packets(cfg)
    return gaussian_density(packet1, x, t), gaussian_density(packet2, x, t)


def total_intensity(cfg: SlitConfig, x, t):
    """Averaged intensity a1^2 P1 + a2^2 P2 + 2 a1 a2 sqrt(P1 P2) cos phi."""
    a1, a2 = cfg.amplitudes
    p1, p2 = slit_densities(cfg, x, t)
    phi = relative_phase(cfg, x, t)
    return a1**2 * p1 + a2**2 * p2 + 2.0 * a1 * a2 * np.sqrt(p1 * p2) * np.cos(phi)


def intensity_field(cfg: SlitConfig, grid: Grid, t: float) -> ScalarField:
    """Sample the total intensity on a grid."""
    return ScalarField(grid, total_intensity(cfg, grid.points, t), t)


def normalize(field: ScalarField) -> ScalarField:
    """Rescale so the trapezoid integral over the grid equals one."""
    integral = field.integral()
    if not integral > 0:
        raise ValidationError(f"cannot normalize field with integral {integral!r}")
    return ScalarField(field.grid, field.values / integral, field.time)


def dark_fringe_positions(cfg: SlitConfig, n_max: int) -> np.ndarray:
    """Node positions x_n = (n + 1/2) pi / k_x for n = 0..n_max.

    Valid when the channel centres coincide (t = -X / v_x), which requires a
    nonzero transverse drift.
    """
    if cfg.v_x == 0:
        raise ValidationError("dark fringe spacing is undefined for v_x = 0")
    n = np.arange(n_max + 1)
    return (n + 0.5) * np.pi / cfg.k_x


@dataclass(frozen=True)
class FringeReport:
    """Interior extrema of a sampled intensity profile.

    Positions are refined to sub-grid accuracy with a parabola through each
    extremum and its two neighbours.  Visibility is (max - min)/(max + min)
    using the brightest maximum and the nearest minimum to it; zero when the
    profile has no such pair.
    """

    time: float
    minima: np.ndarray
    maxima: np.ndarray
    minima_values: np.ndarray
    maxima_values: np.ndarray
    visibility: float


def _refine(x: np.ndarray, v: np.ndarray, idx: np.ndarray, dx: float):
    """Parabolic sub-grid refinement of 3-point extrema at indices idx."""
    positions = np.empty(len(idx))
    values = np.empty(len(idx))
    for k, i in enumerate(idx):
        left, mid, right = v[i - 1], v[i], v[i + 1]
        curvature = left - 2.0 * mid + right
        if curvature == 0.0:
            positions[k], values[k] = x[i], mid
            continue
        delta = 0.5 * (left - right) / curvature
        positions[k] = x[i] + delta * dx
        half_slope = 0.5 * (right - left)
        values[k] = mid + half_slope * delta + 0.5 * curvature * delta**2
    return positions, values


def _extremum_indices(v: np.ndarray):
    """Interior extremum indices, including two-point flat tops/bottoms.

    A pair of equal neighbouring values flanked by lower (higher) values is
    one maximum (minimum) whose parabolic refinement lands exactly on the
    pair midpoint; this matters on grids that straddle a symmetry point.
    Wider plateaus are not extrema (a constant field has none).
    """
    interior = v[1:-1]
    strict_max = (interior > v[:-2]) & (interior > v[2:])
    strict_min = (interior < v[:-2]) & (interior < v[2:])
    flat_pair = v[1:-2] == v[2:-1]
    pair_max = flat_pair & (v[1:-2] > v[:-3]) & (v[2:-1] > v[3:])
    pair_min = flat_pair & (v[1:-2] < v[:-3]) & (v[2:-1] < v[3:])
    max_idx = np.nonzero(strict_max)[0] + 1
    min_idx = np.nonzero(strict_min)[0] + 1
    max_idx = np.union1d(max_idx, np.nonzero(pair_max)[0] + 1)
    min_idx = np.union1d(min_idx, np.nonzero(pair_min)[0] + 1)
    return min_idx, max_idx


def find_extrema(field: ScalarField) -> FringeReport:
    """Locate interior minima and maxima of a sampled field.

    A monotone or constant field yields an empty report.
    """
    if field.grid.n_points < 5:
        raise ValidationError("find_extrema needs at least 5 grid points")
    x = field.grid.points
    v = field.values
    min_idx, max_idx = _extremum_indices(v)
    maxima, maxima_values = _refine(x, v, max_idx, field.grid.dx)
    minima, minima_values = _refine(x, v, min_idx, field.grid.dx)

    visibility = 0.0
    if len(maxima) and len(minima):
        brightest = int(np.argmax(maxima_values))
        nearest = int(np.argmin(np.abs(minima - maxima[brightest])))
        peak, trough = maxima_values[brightest], minima_values[nearest]
        if peak + trough > 0:
            visibility = min(max((peak - trough) / (peak + trough), 0.0), 1.0)
    return FringeReport(
        time=field.time,
        minima=minima,
        maxima=maxima,
        minima_values=minima_values,
        maxima_values=maxima_values,
        visibility=visibility,
    )


def modular_momentum(p, d: float, h: float):
    """p mod (h/d), in [0, h/d); invariant under p -> p + n h/d."""
    if not d > 0:
        raise ValidationError(f"slit distance d must be positive, got {d!r}")
    if not h > 0:
        raise ValidationError(f"h must be positive, got {h!r}")
    return np.remainder(p, h / d)
