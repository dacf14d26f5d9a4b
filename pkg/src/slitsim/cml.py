"""Lattice diffusion with time-dependent diffusivity, plus a walker ensemble.

Both slit channels are evolved as occupation arrays under the explicit
3-point diffusion update

    p_i <- p_i + alpha (p_{i+1} - 2 p_i + p_{i-1}),
    alpha = D_t(t + dt/2) dt / dx^2,

with reflecting boundaries.  Evaluating the diffusivity D_t(t) = u0^2 t at
the step midpoint makes the second moment grow exactly as u0^2 t^2, so an
initially sigma0-wide Gaussian channel tracks the analytic spreading law.
Channels carry no transverse drift: they model slits whose centres stay put.

The walker ensemble realizes the same moment law stochastically: each walker
starts at x0 drawn from the sigma0 Gaussian and moves ballistically with
velocity +-(u +- du) sampled at emission.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Grid, ScalarField, SlitConfig, ValidationError, PhysicalParams
from .dispersion import ballistic_diffusivity
from .interference import normalize


class StabilityError(ValueError):
    """Requested step violates the explicit-diffusion stability bound."""

    def __init__(self, alpha: float, dt: float, dt_max: float):
        super().__init__(
            f"diffusion step unstable: alpha={alpha:.6g} > 0.5 for dt={dt:.6g}; "
            f"maximum admissible dt is {dt_max:.6g}"
        )
        self.alpha = alpha
        self.dt_max = dt_max


@dataclass(frozen=True)
class LatticeState:
    """Occupation arrays of both channels at the current time.

    Each channel's cells sum to one; sums are conserved by stepping.  The
    physical parameters ride along because the update coefficient depends on
    the time-dependent diffusivity.
    """

    grid: Grid
    p1: np.ndarray
    p2: np.ndarray
    time: float
    params: PhysicalParams

    def __post_init__(self) -> None:
        for name in ("p1", "p2"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_points,):
                raise ValidationError(f"{name} does not match the grid")
            if np.any(arr < 0):
                raise ValidationError(f"{name} must be nonnegative")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def channel_fields(self) -> tuple[ScalarField, ScalarField]:
        """Occupations converted to densities (occupation / dx)."""
        dx = self.grid.dx
        return (
            ScalarField(self.grid, self.p1 / dx, self.time),
            ScalarField(self.grid, self.p2 / dx, self.time),
        )

    def channel_variances(self) -> tuple[float, float]:
        """Variance of each channel about its own mean."""
        x = self.grid.points
        out = []
        for p in (self.p1, self.p2):
            total = p.sum()
            mean = (p * x).sum() / total
            out.append(float((p * (x - mean) ** 2).sum() / total))
        return out[0], out[1]


def cml_init(cfg: SlitConfig, grid: Grid, profile: str = "gaussian") -> LatticeState:
    """Channels at +-X, each normalized to unit cell sum.

    `profile` is "gaussian" (width sigma0) or "delta" (single cell at the
    nearest grid point).  The grid must cover +-(X + 6 sigma0).
    """
    reach = cfg.X + 6.0 * cfg.params.sigma0
    if grid.x_min > -reach or grid.x_max < reach:
        raise ValidationError(
            f"grid [{grid.x_min}, {grid.x_max}] does not cover +-{reach}"
        )
    x = grid.points
    channels = []
    for center in (cfg.X, -cfg.X):
        if profile == "gaussian":
            p = np.exp(-((x - center) ** 2) / (2.0 * cfg.params.sigma0**2))
        elif profile == "delta":
            p = np.zeros(grid.n_points)
            p[int(np.argmin(np.abs(x - center)))] = 1.0
        else:
            raise ValidationError(f"unknown profile {profile!r}")
        channels.append(p / p.sum())
    return LatticeState(grid, channels[0], channels[1], 0.0, cfg.params)


def cml_step(state: LatticeState, dt: float) -> LatticeState:
    """One explicit diffusion step with midpoint diffusivity and reflecting ends."""
    params = state.params
    dx = state.grid.dx
    diffusivity = ballistic_diffusivity(params, state.time + dt / 2.0)
    alpha = diffusivity * dt / dx**2
    if alpha > 0.5:
        t = state.time
        dt_max = -t + np.sqrt(t**2 + dx**2 / params.u0**2)
        raise StabilityError(alpha, dt, dt_max)
    new = []
    for p in (state.p1, state.p2):
        lap = np.empty_like(p)
        lap[1:-1] = p[2:] - 2.0 * p[1:-1] + p[:-2]
        lap[0] = p[1] - p[0]
        lap[-1] = p[-2] - p[-1]
        new.append(p + alpha * lap)
    return LatticeState(state.grid, new[0], new[1], state.time + dt, params)


@dataclass(frozen=True)
class CmlRun:
    """Sampled variance history of both channels plus the final state."""

    times: np.ndarray
    var1: np.ndarray
    var2: np.ndarray
    state: LatticeState


def stable_dt(params: PhysicalParams, t: float, dx: float, safety: float) -> float:
    """Largest dt with midpoint stability factor alpha <= 0.5 * safety."""
    return -t + np.sqrt(t**2 + safety * dx**2 / params.u0**2)


def cml_run(
    cfg: SlitConfig,
    grid: Grid,
    t_end: float,
    safety: float = 0.9,
    profile: str = "gaussian",
    n_samples: int = 257,
) -> CmlRun:
    """Evolve both channels to t_end, recording channel variances.

    The step size follows the stability bound with the given safety factor;
    because the diffusivity vanishes at t = 0 the very first step is capped
    at t_end / 1e6.  For the Gaussian profile the recorded variance tracks
    sigma0^2 + u0^2 t^2.
    """
    if not 0 < safety <= 1:
        raise ValidationError(f"safety must be in (0, 1], got {safety!r}")
    if t_end < 0:
        raise ValidationError(f"t_end must be >= 0, got {t_end!r}")
    state = cml_init(cfg, grid, profile)
    sample_times = np.linspace(0.0, t_end, n_samples) if t_end > 0 else np.zeros(1)
    v1_0, v2_0 = state.channel_variances()
    times, var1, var2 = [0.0], [v1_0], [v2_0]
    next_sample = 1
    first = True
    while state.time < t_end:
        dt = stable_dt(cfg.params, state.time, grid.dx, safety)
        if first:
            dt = min(dt, t_end / 1e6)
            first = False
        if next_sample < len(sample_times):
            dt = min(dt, sample_times[next_sample] - state.time)
        dt = min(dt, t_end - state.time)
        state = cml_step(state, dt)
        if next_sample < len(sample_times) and state.time >= sample_times[next_sample]:
            v1, v2 = state.channel_variances()
            times.append(state.time)
            var1.append(v1)
            var2.append(v2)
            next_sample += 1
    return CmlRun(np.asarray(times), np.asarray(var1), np.asarray(var2), state)


def cml_interfere(
    state: LatticeState, phase_fn: Callable[[np.ndarray, float], np.ndarray]
) -> ScalarField:
    """Two-channel intensity p1 + p2 + 2 sqrt(p1 p2) cos(phase), normalized.

    `phase_fn(x, t)` supplies the relative phase per cell.
    """
    dx = state.grid.dx
    rho1, rho2 = state.p1 / dx, state.p2 / dx
    phase = phase_fn(state.grid.points, state.time)
    values = rho1 + rho2 + 2.0 * np.sqrt(rho1 * rho2) * np.cos(phase)
    return normalize(ScalarField(state.grid, values, state.time))


@dataclass(frozen=True)
class WalkerEnsemble:
    """Per-walker emission draws for the ballistic ensemble.

    `u_draw` is the magnitude of the osmotic velocity field at each walker's
    start point; `du_draw` is the zero-mean Gaussian fluctuation whose
    variance tops the mean-square total velocity up to exactly u0^2 (at
    emission that variance is u0^2 - D^2/sigma0^2 = 0, so the field term
    alone carries the full u0^2).  Signs are independent and equiprobable.
    """

    count: int
    x0: np.ndarray
    u_draw: np.ndarray
    du_draw: np.ndarray
    sign: np.ndarray
    inner_sign: np.ndarray
    seed: int

    def positions(self, t: float) -> np.ndarray:
        """Ballistic propagation x(t) = x0 +- (u +- du) t."""
        return self.x0 + self.sign * (self.u_draw + self.inner_sign * self.du_draw) * t


def draw_walker_ensemble(
    params: PhysicalParams, count: int, seed: int
) -> WalkerEnsemble:
    """Sample emission positions, velocities and signs reproducibly.

    Uses a counter-based generator so identical seeds give identical draws
    regardless of how the ensemble is partitioned across workers.
    """
    if count < 1:
        raise ValidationError(f"walker count must be >= 1, got {count!r}")
    rng = np.random.Generator(np.random.Philox(seed))
    x0 = rng.normal(0.0, params.sigma0, count)
    u_draw = params.diffusion_constant * np.abs(x0) / params.sigma0**2
    du_var = max(params.u0**2 - (params.diffusion_constant / params.sigma0) ** 2, 0.0)
    du_draw = rng.normal(0.0, np.sqrt(du_var), count)
    sign = rng.integers(0, 2, count) * 2.0 - 1.0
    inner_sign = rng.integers(0, 2, count) * 2.0 - 1.0
    return WalkerEnsemble(count, x0, u_draw, du_draw, sign, inner_sign, seed)


def walker_ensemble_msd(
    params: PhysicalParams, count: int, t: float, seed: int
) -> float:
    """Ensemble mean of x(t)^2; approaches x2(0) + u0^2 t^2 for large counts."""
    if t < 0:
        raise ValidationError(f"walker propagation requires t >= 0, got {t!r}")
    ensemble = draw_walker_ensemble(params, count, seed)
    return float(np.mean(ensemble.positions(t) ** 2))
