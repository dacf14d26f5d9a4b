"""Config-driven pipeline: computes artifacts and verification summaries.

Commands
--------
intensity     normalized screen intensity per frame (CSV / PGM / PNG)
trajectories  averaged trajectories, no-crossing and flux-tube checks
fringes       extrema of the interference profile vs the analytic nodes
cml           lattice-diffusion pipeline and walker moment checks
verify        full equivalence suite against the wave-packet reference
all           everything above

Every command returns a machine-readable summary; a check line renders as
``name: PASS worst=<value> at x=<pos>, t=<time>``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cml as cml_mod
from . import dynamics, interference, oracle, output, plots
from .config import ExperimentConfig
from .core import Grid, ScalarField, SlitConfig, ValidationError
from .dispersion import gaussian_density, packet_variance, slit_packets

COMMANDS = ("intensity", "trajectories", "fringes", "cml", "verify", "all")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    x: float
    t: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name}: {status} worst={self.worst:.6g} "
            f"at x={self.x:.6g}, t={self.t:.6g}"
        )


@dataclass
class PipelineResult:
    command: str
    checks: list[CheckResult]
    artifacts: list[Path]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def summary_lines(self) -> list[str]:
        return [check.line() for check in self.checks]


def run_pipeline(config: ExperimentConfig, command: str) -> PipelineResult:
    """Execute one pipeline command and collect its checks and artifacts."""
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}")
    runners = {
        "intensity": _run_intensity,
        "trajectories": _run_trajectories,
        "fringes": _run_fringes,
        "cml": _run_cml,
        "verify": _run_verify,
    }
    names = COMMANDS[:-1] if command == "all" else (command,)
    checks: list[CheckResult] = []
    artifacts: list[Path] = []
    for name in names:
        sub_checks, sub_artifacts = runners[name](config)
        checks += sub_checks
        artifacts += sub_artifacts
    result = PipelineResult(command, checks, artifacts)
    summary_path = _out_dir(config) / f"summary_{command}.txt"
    summary_path.write_text("\n".join(result.summary_lines()) + "\n", encoding="utf-8")
    result.artifacts.append(summary_path)
    return result


def _out_dir(config: ExperimentConfig) -> Path:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    return config.out_dir


def _wrap_angle(angle):
    return np.remainder(angle + np.pi, 2.0 * np.pi) - np.pi


# ---------------------------------------------------------------- intensity


def _run_intensity(config: ExperimentConfig):
    cfg, grid = config.slit, config.grid
    frames = [
        interference.normalize(interference.intensity_field(cfg, grid, t))
        for t in config.frame_times
    ]

    checks = []
    integrals = np.array([frame.integral() for frame in frames])
    worst_frame = int(np.argmax(np.abs(integrals - 1.0)))
    checks.append(
        CheckResult(
            "intensity normalization",
            bool(np.max(np.abs(integrals - 1.0)) <= 1e-9),
            float(np.max(np.abs(integrals - 1.0))),
            0.0,
            float(config.frame_times[worst_frame]),
        )
    )
    if cfg.amplitude_ratio == 1.0:
        worst, x_worst, t_worst = 0.0, 0.0, config.t0
        for t in config.frame_times:
            forward = interference.total_intensity(cfg, grid.points, t)
            mirrored = interference.total_intensity(cfg, -grid.points, t)
            dev = np.abs(forward - mirrored) / forward.max()
            k = int(np.argmax(dev))
            if dev[k] > worst:
                worst, x_worst, t_worst = float(dev[k]), float(grid.points[k]), t
        checks.append(
            CheckResult(
                "intensity mirror symmetry", worst <= 1e-12, worst, x_worst, t_worst
            )
        )

    artifacts = []
    out = _out_dir(config)
    if "csv" in config.formats:
        for k, frame in enumerate(frames):
            artifacts.append(output.write_csv(frame, out / f"intensity_frame{k}.csv"))
    if "pgm" in config.formats:
        artifacts += output.write_heatmap(frames, out / "intensity.pgm")
    if "png" in config.formats:
        artifacts.append(
            plots.save_intensity_map(frames, cfg.v_y, out / "intensity.png")
        )
    return checks, artifacts


# ------------------------------------------------------------- trajectories


def _run_trajectories(config: ExperimentConfig):
    cfg, grid = config.slit, config.grid
    seeds = dynamics.equidistant_seeds(
        cfg, config.n_seeds, config.seed_span_sigmas, config.t0
    )
    traj = dynamics.integrate_trajectories(
        cfg,
        seeds,
        config.t0,
        config.t1,
        config.dt_init,
        n_store=10 * config.n_frames + 1,
        dx_cap=grid.dx,
    )
    fields = [
        interference.normalize(interference.intensity_field(cfg, grid, t))
        for t in traj.times
    ]

    checks = []
    signs = np.sign(traj.positions)
    changed = np.any(signs != signs[:, :1], axis=1)
    worst_seed = int(np.argmax(changed)) if np.any(changed) else 0
    checks.append(
        CheckResult(
            "trajectory no-crossing",
            not np.any(changed),
            float(np.count_nonzero(changed)),
            float(seeds[worst_seed]),
            float(config.t0),
        )
    )

    mirror_dev = np.abs(traj.positions + traj.positions[::-1])
    k = np.unravel_index(int(np.argmax(mirror_dev)), mirror_dev.shape)
    checks.append(
        CheckResult(
            "trajectory mirror symmetry",
            bool(mirror_dev.max() <= 1e-8),
            float(mirror_dev.max()),
            float(traj.positions[k[0], k[1]]),
            float(traj.times[k[1]]),
        )
    )

    flux = dynamics.tube_fluxes(fields, traj)
    occupied = flux[:, 0] > 1e-4
    if np.any(occupied):
        drift = np.abs(flux[occupied] - flux[occupied, :1]) / flux[occupied, :1]
        k = np.unravel_index(int(np.argmax(drift)), drift.shape)
        tube = np.nonzero(occupied)[0][k[0]]
        checks.append(
            CheckResult(
                "flux tube drift",
                bool(drift.max() <= 0.01),
                float(drift.max()),
                float(traj.positions[tube, k[1]]),
                float(traj.times[k[1]]),
            )
        )

    artifacts = []
    out = _out_dir(config)
    if "csv" in config.formats:
        artifacts.append(output.write_csv(traj, out / "trajectories.csv"))
    if "pgm" in config.formats:
        artifacts += output.write_heatmap(
            fields, out / "trajectories.pgm", trajectories=traj
        )
    if "png" in config.formats:
        artifacts.append(
            plots.save_intensity_map(
                fields, cfg.v_y, out / "trajectories.png", trajectories=traj
            )
        )
    return checks, artifacts


# ------------------------------------------------------------------ fringes


def _fringe_setting(config: ExperimentConfig):
    """Evaluation grid, time and analytic nodes for the fringe analysis.

    With approaching packets the natural time is the coincidence time
    t* = -X/v_x, and the grid is widened to cover the first three nodes.
    """
    cfg = config.slit
    t_star = -cfg.X / cfg.v_x if cfg.v_x != 0 else None
    if t_star is not None and t_star > 0:
        nodes = interference.dark_fringe_positions(cfg, 2)
        extent = 1.15 * nodes[-1]
        return Grid(-extent, extent, config.grid.n_points), t_star, nodes
    return config.grid, config.t1, None


def _run_fringes(config: ExperimentConfig):
    cfg = config.slit
    grid, t_star, nodes = _fringe_setting(config)
    field = interference.normalize(interference.intensity_field(cfg, grid, t_star))
    report = interference.find_extrema(field)

    checks = []
    if nodes is not None:
        positive = np.sort(report.minima[report.minima > 0])
        if len(positive) >= len(nodes):
            deviation = np.abs(positive[: len(nodes)] - nodes)
            k = int(np.argmax(deviation))
            checks.append(
                CheckResult(
                    "dark fringe positions",
                    bool(deviation.max() <= 0.01),
                    float(deviation.max()),
                    float(positive[k]),
                    float(t_star),
                )
            )
        else:
            checks.append(
                CheckResult(
                    "dark fringe positions", False, float("inf"), 0.0, float(t_star)
                )
            )

    merged = sorted(
        [(x, "min") for x in report.minima] + [(x, "max") for x in report.maxima]
    )
    alternating = all(a[1] != b[1] for a, b in zip(merged, merged[1:]))
    checks.append(
        CheckResult(
            "extrema interleaving",
            alternating,
            0.0 if alternating else 1.0,
            float(merged[0][0]) if merged else 0.0,
            float(t_star),
        )
    )

    artifacts = []
    out = _out_dir(config)
    if "csv" in config.formats:
        artifacts.append(output.write_extrema_csv(report, out / "fringes.csv"))
        artifacts.append(output.write_csv(field, out / "fringes_profile.csv"))
    if "png" in config.formats:
        artifacts.append(
            plots.save_fringe_profile(field, report, nodes, out / "fringes.png")
        )
    return checks, artifacts


# ---------------------------------------------------------------------- cml


def _cml_setting(config: ExperimentConfig):
    """Drift-free slit configuration and lattice grid for the diffusion runs.

    The lattice update is pure diffusion, so the channels are evolved in the
    static-centre frame (v_x = 0); the closed-form comparisons use the same
    drift-free configuration.  The lattice grid is capped at 1024 cells to
    keep the step count moderate.
    """
    cfg = dataclasses.replace(config.slit, v_x=0.0)
    n = min(config.grid.n_points, 1024)
    return cfg, Grid(config.grid.x_min, config.grid.x_max, n)


def _run_cml(config: ExperimentConfig):
    cfg, grid = _cml_setting(config)
    t_end = config.t1 if config.t1 > 0 else 1.0
    run = cml_mod.cml_run(cfg, grid, t_end, safety=config.cml_safety,
                          profile=config.cml_profile)

    checks = []
    analytic = packet_variance(cfg.params, run.times)
    if config.cml_profile == "gaussian":
        rel = abs(run.var1[-1] - analytic[-1]) / analytic[-1]
        checks.append(
            CheckResult("cml variance law", rel <= 0.02, float(rel), 0.0, t_end)
        )
        growth = run.var1 - run.var1[0]
        window = (run.times >= t_end / 10.0) & (growth > 0)
        slope = np.polyfit(np.log(run.times[window]), np.log(growth[window]), 1)[0]
        checks.append(
            CheckResult(
                "ballistic exponent",
                bool(abs(slope - 2.0) <= 0.1),
                float(slope),
                0.0,
                t_end,
            )
        )
        channel1, _ = run.state.channel_fields()
        packet1, _ = slit_packets(cfg)
        reference = ScalarField(
            grid, gaussian_density(packet1, grid.points, t_end), t_end
        )
        comparison = oracle.compare_fields(channel1, reference, 0.02, mask_floor=0.01)
        checks.append(
            CheckResult(
                "cml channel dispersion",
                comparison.passed,
                comparison.max_deviation,
                comparison.x_worst,
                t_end,
            )
        )

    def phase_fn(x, t):
        return interference.relative_phase(cfg, x, t)

    lattice_intensity = cml_mod.cml_interfere(run.state, phase_fn)
    closed_form = interference.normalize(
        interference.intensity_field(cfg, grid, t_end)
    )
    comparison = oracle.compare_fields(
        lattice_intensity, closed_form, 0.02, mask_floor=0.01
    )
    checks.append(
        CheckResult(
            "cml interference",
            comparison.passed,
            comparison.max_deviation,
            comparison.x_worst,
            t_end,
        )
    )

    t_walk = config.t0 + 0.25 * (config.t1 - config.t0)
    msd = cml_mod.walker_ensemble_msd(
        cfg.params, config.walker_count, t_walk, config.rng_seed
    )
    expected = cfg.params.sigma0**2 + cfg.params.u0**2 * t_walk**2
    rel = abs(msd - expected) / expected
    checks.append(
        CheckResult("walker moment law", rel <= 0.01, float(rel), 0.0, float(t_walk))
    )

    artifacts = []
    out = _out_dir(config)
    if "csv" in config.formats:
        artifacts.append(
            output.write_columns_csv(
                out / "cml_variance.csv",
                "t,var_channel1,var_channel2",
                [run.times, run.var1, run.var2],
            )
        )
        artifacts.append(output.write_csv(lattice_intensity, out / "cml_intensity.csv"))
    if "png" in config.formats:
        artifacts.append(
            plots.save_variance_growth(
                run.times, run.var1, analytic, out / "cml_variance.png"
            )
        )
        artifacts.append(
            plots.save_field_overlay(
                [lattice_intensity, closed_form],
                ["lattice", "closed form"],
                out / "cml_intensity.png",
            )
        )
    return checks, artifacts


# -------------------------------------------------------------------- verify


def _run_verify(config: ExperimentConfig):
    cfg, grid = config.slit, config.grid
    times = config.frame_times
    checks = [
        _check_current_identity(cfg, grid, times),
        _check_intensity_identity(cfg, grid, times),
        _check_packet_density(cfg, grid, times),
        _check_phase_identity(config),
        _check_expanded_current(config),
        _check_non_additivity(config),
    ]
    fringe_check = _check_dark_fringes(config)
    if fringe_check is not None:
        checks.append(fringe_check)
    return checks, []


def _reduce_comparisons(name: str, comparisons) -> CheckResult:
    """Fold (t, FieldComparison) pairs into one check at the worst time."""
    all_passed = True
    worst_dev, worst_x, worst_t = -1.0, 0.0, 0.0
    for t, cmp in comparisons:
        all_passed &= cmp.passed
        if cmp.max_deviation > worst_dev:
            worst_dev, worst_x, worst_t = cmp.max_deviation, cmp.x_worst, float(t)
    return CheckResult(name, all_passed, max(worst_dev, 0.0), worst_x, worst_t)


def _check_current_identity(cfg: SlitConfig, grid: Grid, times) -> CheckResult:
    comparisons = []
    for t in times:
        p_tot = interference.total_intensity(cfg, grid.points, t)
        mask = p_tot > 1e-10 * p_tot.max()
        classical = ScalarField(grid, dynamics.total_current(cfg, grid.points, t), t)
        reference = ScalarField(grid, oracle.quantum_current(cfg, grid.points, t), t)
        comparisons.append((t, oracle.compare_fields(classical, reference, 1e-6, where=mask)))
    return _reduce_comparisons("current identity", comparisons)


def _check_intensity_identity(cfg: SlitConfig, grid: Grid, times) -> CheckResult:
    comparisons = []
    for t in times:
        classical = ScalarField(
            grid, interference.total_intensity(cfg, grid.points, t), t
        )
        reference = ScalarField(grid, oracle.superposed_density(cfg, grid.points, t), t)
        comparisons.append((t, oracle.compare_fields(classical, reference, 1e-8)))
    return _reduce_comparisons("intensity identity", comparisons)


def _check_packet_density(cfg: SlitConfig, grid: Grid, times) -> CheckResult:
    packet1, _ = slit_packets(cfg)
    comparisons = []
    for t in times:
        psi = oracle.packet_wavefunction(packet1, grid.points, t)
        quantum = ScalarField(grid, np.abs(psi) ** 2, t)
        classical = ScalarField(grid, gaussian_density(packet1, grid.points, t), t)
        comparisons.append((t, oracle.compare_fields(classical, quantum, 1e-12)))
    return _reduce_comparisons("packet density identity", comparisons)


def _check_phase_identity(config: ExperimentConfig, n_points: int = 1000) -> CheckResult:
    cfg, grid = config.slit, config.grid
    rng = np.random.Generator(np.random.Philox(config.rng_seed))
    packet1, packet2 = slit_packets(cfg)
    xs, ts = [], []
    while len(xs) < n_points:
        x = rng.uniform(grid.x_min, grid.x_max, 4 * n_points)
        t = rng.uniform(config.t0, config.t1, 4 * n_points)
        psi1 = oracle.packet_wavefunction(packet1, x, t)
        psi2 = oracle.packet_wavefunction(packet2, x, t)
        keep = (np.abs(psi1) > 1e-10) & (np.abs(psi2) > 1e-10)
        xs += list(x[keep])
        ts += list(t[keep])
    x = np.array(xs[:n_points])
    t = np.array(ts[:n_points])
    classical = interference.relative_phase(cfg, x, t)
    reference = oracle.phase_difference(cfg, x, t)
    deviation = np.abs(_wrap_angle(classical - reference))
    k = int(np.argmax(deviation))
    return CheckResult(
        "phase identity",
        bool(deviation[k] <= 1e-8),
        float(deviation[k]),
        float(x[k]),
        float(t[k]),
    )


def _check_dark_fringes(config: ExperimentConfig) -> CheckResult | None:
    grid, t_star, nodes = _fringe_setting(config)
    if nodes is None:
        return None
    field = interference.intensity_field(config.slit, grid, t_star)
    report = interference.find_extrema(field)
    positive = np.sort(report.minima[report.minima > 0])
    if len(positive) < len(nodes):
        return CheckResult("dark fringes", False, float("inf"), 0.0, float(t_star))
    deviation = np.abs(positive[: len(nodes)] - nodes)
    k = int(np.argmax(deviation))
    return CheckResult(
        "dark fringes",
        bool(deviation.max() <= 0.01),
        float(deviation.max()),
        float(positive[k]),
        float(t_star),
    )


def _check_expanded_current(
    config: ExperimentConfig, n_points: int = 10_000
) -> CheckResult:
    cfg, grid = config.slit, config.grid
    rng = np.random.Generator(np.random.Philox(config.rng_seed + 1))
    x = rng.uniform(grid.x_min, grid.x_max, n_points)
    t = rng.uniform(config.t0, config.t1, n_points)
    closed = dynamics.total_current(cfg, x, t)
    expanded = dynamics.total_current_expanded(cfg, x, t)
    gap = np.abs(expanded - closed)
    passed = bool(np.all(gap <= 1e-12 * np.abs(closed) + 1e-15))
    scale = np.abs(closed).max()
    k = int(np.argmax(gap))
    return CheckResult(
        "expanded current identity",
        passed,
        float(gap.max() / scale) if scale > 0 else 0.0,
        float(x[k]),
        float(t[k]),
    )


def _probe_fringe(config: ExperimentConfig):
    """A time with detected dark fringes, preferring the coincidence time."""
    cfg = config.slit
    candidates = list(config.frame_times)[::-1]
    if cfg.v_x != 0:
        t_star = -cfg.X / cfg.v_x
        if config.t0 <= t_star <= config.t1:
            candidates.insert(0, t_star)
    for t in candidates:
        report = interference.find_extrema(
            interference.intensity_field(cfg, config.grid, t)
        )
        if len(report.minima) and len(report.maxima):
            return float(t), report
    return None, None


def _check_non_additivity(config: ExperimentConfig) -> CheckResult:
    """The averaged current is not the sum of the single-channel currents.

    Evaluated at a detected dark fringe; the gap must clear 1e-3 of the
    current's peak, three orders above the current-identity tolerance.
    """
    cfg, grid = config.slit, config.grid
    t, report = _probe_fringe(config)
    if t is None:
        return CheckResult("current non-additivity", False, 0.0, 0.0, config.t1)
    brightest = report.maxima[int(np.argmax(report.maxima_values))]
    x_star = float(report.minima[int(np.argmin(np.abs(report.minima - brightest)))])

    p1, p2 = interference.slit_densities(cfg, x_star, t)
    dec = dynamics.velocity_decomposition(cfg, x_star, t)
    a1, a2 = cfg.amplitudes
    single_sum = a1**2 * p1 * dec.v1 + a2**2 * p2 * dec.v2
    gap = abs(dynamics.total_current(cfg, x_star, t) - single_sum)
    scale = np.abs(dynamics.total_current(cfg, grid.points, t)).max()
    dev = float(gap / scale)
    return CheckResult("current non-additivity", dev > 1e-3, dev, x_star, float(t))
