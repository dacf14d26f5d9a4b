"""Averaged two-channel current, trajectory velocity field and flux tubes.

The closed-form current combines the per-channel transport velocities v_i
(drift plus dispersion flow) with the outward osmotic velocities u_i:

    J = a1^2 P1 v1 + a2^2 P2 v2
        + a1 a2 sqrt(P1 P2) [ (v1 + v2) cos phi + (u2 - u1) sin phi ],

which is pointwise identical to the probability current of the superposed
wave packets.  Averaged trajectories are integral curves of J / P_tot,
integrated with classical RK4 plus step halving near intensity nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ScalarField, SlitConfig, ValidationError
from .dispersion import (
    osmotic_velocity,
    packet_variance,
    packet_velocity_field,
    slit_packets,
)
from .interference import relative_phase, slit_densities, total_intensity


class NodeSingularityError(RuntimeError):
    """Velocity requested where the total intensity is below the node floor."""

    def __init__(self, position: float, time: float):
        super().__init__(
            f"total intensity below node floor at x={position!r}, t={time!r}"
        )
        self.position = position
        self.time = time


# Relative intensity floor below which the velocity field is treated as
# singular; scaled by the constructive peak bound at each time.
NODE_FLOOR = 1e-14


@dataclass(frozen=True)
class VelocityDecomposition:
    """Per-channel transport (v1, v2) and outward osmotic (u1, u2) velocities."""

    v1: object
    v2: object
    u1: object
    u2: object

    @property
    def u1_minus(self):
        return -self.u1

    @property
    def u2_minus(self):
        return -self.u2


def velocity_decomposition(cfg: SlitConfig, x, t) -> VelocityDecomposition:
    """Evaluate both channels' transport and osmotic velocity fields."""
    packet1, packet2 = slit_packets(cfg)
    return VelocityDecomposition(
        v1=packet_velocity_field(packet1, x, t),
        v2=packet_velocity_field(packet2, x, t),
        u1=osmotic_velocity(packet1, x, t),
        u2=osmotic_velocity(packet2, x, t),
    )


def total_current(cfg: SlitConfig, x, t):
    """Closed-form averaged current of the two-channel configuration."""
    a1, a2 = cfg.amplitudes
    p1, p2 = slit_densities(cfg, x, t)
    dec = velocity_decomposition(cfg, x, t)
    phi = relative_phase(cfg, x, t)
    cross = (dec.v1 + dec.v2) * np.cos(phi) + (dec.u2 - dec.u1) * np.sin(phi)
    return a1**2 * p1 * dec.v1 + a2**2 * p2 * dec.v2 + (
        a1 * a2 * np.sqrt(p1 * p2) * cross
    )


def total_current_expanded(cfg: SlitConfig, x, t):
    """Literal nine-term expansion of the averaged current.

    Each term pairs a velocity magnitude with the cosine of the angle between
    two unit vectors of the channel velocity fields.  Parallel pairs
    (v1,v2) and (u1,u2) contribute cos phi; the mixed pairs contribute
    +-sin phi, with (v1,u2) -> +sin phi and (u1,v2) -> -sin phi.  The six
    pure-osmotic terms cancel identically, reducing this to `total_current`.
    """
    a1, a2 = cfg.amplitudes
    p1, p2 = slit_densities(cfg, x, t)
    dec = velocity_decomposition(cfg, x, t)
    v1, v2, u1, u2 = dec.v1, dec.v2, dec.u1, dec.u2
    phi = relative_phase(cfg, x, t)
    cos_v1_v2 = np.cos(phi)
    cos_u1_u2 = np.cos(phi)
    cos_v1_u2 = np.sin(phi)
    cos_u1_v2 = -np.sin(phi)
    cross = (
        (v1 + v2) * cos_v1_v2
        + (v1 + u2 / 2.0) * cos_v1_u2
        - (v1 - u2 / 2.0) * cos_v1_u2
        + (u1 / 2.0 + v2) * cos_u1_v2
        - (-u1 / 2.0 + v2) * cos_u1_v2
        + (u1 / 2.0 + u2 / 2.0) * cos_u1_u2
        - (u1 / 2.0 - u2 / 2.0) * cos_u1_u2
        - (-u1 / 2.0 + u2 / 2.0) * cos_u1_u2
        + (-u1 / 2.0 - u2 / 2.0) * cos_u1_u2
    )
    return a1**2 * p1 * v1 + a2**2 * p2 * v2 + a1 * a2 * np.sqrt(p1 * p2) * cross


def intensity_peak_bound(cfg: SlitConfig, t) -> float:
    """Upper bound (a1 + a2)^2 / (sqrt(2 pi) sigma) on the total intensity."""
    a1, a2 = cfg.amplitudes
    return (a1 + a2) ** 2 / np.sqrt(2.0 * np.pi * packet_variance(cfg.params, t))


def average_velocity(cfg: SlitConfig, x, t):
    """Trajectory velocity v_tot = J_tot / P_tot.

    Raises NodeSingularityError when the intensity at any requested point
    falls below NODE_FLOOR times the peak bound for that time.
    """
    p_tot = total_intensity(cfg, x, t)
    floor = NODE_FLOOR * intensity_peak_bound(cfg, t)
    bad = np.asarray(p_tot) <= floor
    if np.any(bad):
        x_bad = np.asarray(x)[bad] if np.ndim(x) else x
        raise NodeSingularityError(float(np.atleast_1d(x_bad)[0]), float(t))
    return total_current(cfg, x, t) / p_tot


@dataclass(frozen=True)
class TrajectorySet:
    """Positions of a family of seeds at common stored times.

    `positions[i, k]` is seed i at `times[k]`; the screen coordinate is
    y = v_y * times.  Seeds whose integration step underflowed near a node
    are flagged in `stalled` and keep their last good position afterwards.
    """

    seeds: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    v_y: float
    stalled: np.ndarray

    def __post_init__(self) -> None:
        for name in ("seeds", "times", "positions"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        stalled = np.array(self.stalled, dtype=bool)
        stalled.setflags(write=False)
        object.__setattr__(self, "stalled", stalled)
        if not np.all(np.diff(self.times) > 0):
            raise ValidationError("stored times must be strictly increasing")
        if self.positions.shape != (len(self.seeds), len(self.times)):
            raise ValidationError("positions shape must be (n_seeds, n_times)")
        if not np.all(np.isfinite(self.positions)):
            raise ValidationError("trajectory positions must be finite")

    @property
    def y(self) -> np.ndarray:
        return self.v_y * self.times


def integrate_trajectories(
    cfg: SlitConfig,
    seeds,
    t0: float,
    t1: float,
    dt_init: float,
    n_store: int = 161,
    dx_cap: float | None = None,
) -> TrajectorySet:
    """Integrate dx/dt = average_velocity for every seed with adaptive RK4.

    The step is capped so that no seed moves more than `dx_cap` per step
    (default sigma0 / 100) and halved whenever a step would land a seed where
    the intensity is below the node floor.  If halving reaches
    dt_init * 2**-20 the offending seeds are flagged as stalled and frozen;
    the remaining seeds continue.  All seeds share each accepted step, which
    keeps mirror-symmetric seed sets exactly mirror-symmetric.
    """
    seeds = np.atleast_1d(np.asarray(seeds, dtype=float))
    if seeds.size == 0:
        raise ValidationError("seeds must be nonempty")
    if not t0 < t1:
        raise ValidationError(f"need t0 < t1, got {t0!r} >= {t1!r}")
    if not dt_init > 0:
        raise ValidationError(f"dt_init must be positive, got {dt_init!r}")
    if dx_cap is None:
        dx_cap = cfg.params.sigma0 / 100.0
    dt_min = dt_init * 2.0**-20

    times = np.linspace(t0, t1, n_store)
    positions = np.empty((seeds.size, n_store))
    positions[:, 0] = seeds
    stalled = np.zeros(seeds.size, dtype=bool)

    def velocity(x, t):
        p_tot = total_intensity(cfg, x, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return total_current(cfg, x, t) / p_tot

    x = seeds.copy()
    t = t0
    dt = dt_init
    for k in range(1, n_store):
        t_target = times[k]
        while t < t_target:
            active = ~stalled
            if not np.any(active):
                t = t_target
                break
            v_now = velocity(x[active], t)
            finite = np.isfinite(v_now)
            speed = np.max(np.abs(v_now[finite])) if np.any(finite) else 0.0
            if speed > 0:
                dt = min(dt, dx_cap / speed)
            dt_try = min(dt, t_target - t)
            while True:
                x_new = _rk4_step(velocity, x[active], t, dt_try)
                floor = NODE_FLOOR * intensity_peak_bound(cfg, t + dt_try)
                ok = np.isfinite(x_new) & (
                    total_intensity(cfg, x_new, t + dt_try) > floor
                )
                if np.all(ok):
                    break
                if dt_try <= dt_min:
                    # Freeze the seeds stuck at the node, keep the rest going.
                    stuck = np.nonzero(active)[0][~ok]
                    stalled[stuck] = True
                    x_new = x_new[ok]
                    active = ~stalled
                    break
                dt_try *= 0.5
            x[active] = x_new
            t += dt_try
            dt = min(dt_init, max(dt_try, dt) * 2.0)
        positions[:, k] = x
        t = t_target
    return TrajectorySet(seeds, times, positions, cfg.v_y, stalled)


def _rk4_step(f, x, t, dt):
    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def equidistant_seeds(cfg: SlitConfig, n_per_slit: int, span_sigmas: float, t0: float):
    """Equidistant seeds spanning +-span_sigmas * sigma0 around each channel centre.

    The left-channel seeds are the exact negation of the right-channel ones.
    The union is returned sorted ascending (the spans may overlap between the
    slits), which keeps it exactly anti-symmetric.
    """
    c1, _ = cfg.centers(t0)
    half = span_sigmas * cfg.params.sigma0
    right = np.linspace(c1 - half, c1 + half, n_per_slit)
    left = -right[::-1]
    return np.sort(np.concatenate([left, right]), kind="stable")


def _partial_integral(field: ScalarField, pos):
    """Trapezoid integral of the field from grid start to each position."""
    x = field.grid.points
    v = field.values
    cumulative = np.concatenate(
        [[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(x))]
    )
    pos = np.asarray(pos, dtype=float)
    if np.any(pos < x[0]) or np.any(pos > x[-1]):
        raise ValidationError("flux endpoints fall outside the field grid")
    idx = np.clip(np.searchsorted(x, pos, side="right") - 1, 0, len(x) - 2)
    x_left = x[idx]
    frac = (pos - x_left) / (x[idx + 1] - x_left)
    v_at = v[idx] + (v[idx + 1] - v[idx]) * frac
    return cumulative[idx] + 0.5 * (v[idx] + v_at) * (pos - x_left)


def flux_between(
    field_time_series: Sequence[ScalarField],
    traj_a,
    traj_b,
) -> np.ndarray:
    """Probability between two trajectories at each stored time.

    `traj_a` and `traj_b` are position series aligned with the fields; the
    first must stay at or left of the second (flux tubes are ill-defined for
    crossing trajectories).
    """
    traj_a = np.asarray(traj_a, dtype=float)
    traj_b = np.asarray(traj_b, dtype=float)
    if not (len(traj_a) == len(traj_b) == len(field_time_series)):
        raise ValidationError("trajectory series and field series lengths differ")
    if np.any(traj_a > traj_b):
        raise ValidationError("trajectories cross; flux tube is ill-defined")
    flux = np.empty(len(field_time_series))
    for k, field in enumerate(field_time_series):
        upper, lower = _partial_integral(field, [traj_b[k], traj_a[k]])
        flux[k] = upper - lower
    return flux


def tube_fluxes(
    field_time_series: Sequence[ScalarField], trajectories: TrajectorySet
) -> np.ndarray:
    """Flux of every tube between adjacent trajectories, shape (n_seeds-1, n_times).

    Seeds must be ordered ascending and non-crossing.
    """
    positions = trajectories.positions
    if not (positions.shape[1] == len(field_time_series)):
        raise ValidationError("field series does not match the stored times")
    if np.any(np.diff(positions, axis=0) < 0):
        raise ValidationError("trajectories cross; flux tubes are ill-defined")
    flux = np.empty((positions.shape[0] - 1, positions.shape[1]))
    for k, field in enumerate(field_time_series):
        flux[:, k] = np.diff(_partial_integral(field, positions[:, k]))
    return flux
