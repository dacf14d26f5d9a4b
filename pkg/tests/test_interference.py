import numpy as np
import pytest

from slitsim import make_params, make_grid, SlitConfig, ScalarField
from slitsim.core import ValidationError
from slitsim.dispersion import gaussian_density, sigma_t, slit_packets
from slitsim.interference import (
    dark_fringe_positions,
    find_extrema,
    intensity_field,
    modular_momentum,
    normalize,
    relative_phase,
    slit_densities,
    total_intensity,
)
from slitsim import oracle


def default_cfg(**kwargs):
    return SlitConfig(make_params(1, 1, 1), **kwargs)


def test_phase_is_zero_on_axis():
    cfg = default_cfg()
    for t in (0.0, 2.0, 4.0, 7.5):
        assert relative_phase(cfg, 0.0, t) == 0.0


def test_phase_worked_value():
    # hbar=m=1, sigma0=1, X=2, v_x=0, x=1, t=2: -2*1*2*(0.25*2/2) = -1
    cfg = default_cfg(X=2.0, v_x=0.0)
    assert relative_phase(cfg, 1.0, 2.0) == pytest.approx(-1.0, rel=1e-14)


def test_phase_matches_wavefunction_argument_difference():
    cfg = default_cfg()
    rng = np.random.default_rng(7)
    x = rng.uniform(-10, 10, 500)
    t = rng.uniform(0.0, 8.0, 500)
    gap = relative_phase(cfg, x, t) - oracle.phase_difference(cfg, x, t)
    wrapped = np.remainder(gap + np.pi, 2 * np.pi) - np.pi
    assert np.max(np.abs(wrapped)) <= 1e-8


def test_phase_drift_term_only_at_coincidence():
    # X = -v_x t makes the displacement factor vanish identically
    cfg = default_cfg(X=1.5, v_x=-0.5)
    t = 3.0
    x = np.linspace(-10, 10, 101)
    expected = 2 * cfg.params.mass * cfg.v_x * x / cfg.params.hbar_eff
    assert np.array_equal(relative_phase(cfg, x, t), expected)


def test_phase_linear_in_slit_distance_without_drift():
    # closing-slit sensitivity: with v_x = 0 the phase is exactly linear in X
    t, x = 2.0, np.linspace(-12, 12, 401)
    narrow = default_cfg(X=1.3, v_x=0.0)
    wide = default_cfg(X=2.6, v_x=0.0)
    assert np.array_equal(relative_phase(wide, x, t), 2 * relative_phase(narrow, x, t))


def test_slit_densities_equal_on_axis():
    cfg = default_cfg()
    for t in (0.0, 1.0, 3.7):
        p1, p2 = slit_densities(cfg, 0.0, t)
        assert p1 == p2


def test_slit_density_peak():
    cfg = default_cfg()
    t = 1.5
    peak_x = cfg.X + cfg.v_x * t
    p1, _ = slit_densities(cfg, peak_x, t)
    assert p1 == pytest.approx(1 / (np.sqrt(2 * np.pi) * sigma_t(cfg.params, t)), rel=1e-14)


def test_slit_densities_normalized_by_quadrature():
    cfg = default_cfg()
    t = 2.0
    sig = sigma_t(cfg.params, t)
    for center in cfg.centers(t):
        x = np.linspace(center - 12 * sig, center + 12 * sig, 16001)
        p1, p2 = slit_densities(cfg, x, t)
        density = p1 if center > 0 else p2
        assert abs(np.trapezoid(density, x) - 1.0) <= 1e-10


def test_constructive_factor_four_at_coincidence():
    cfg = default_cfg()  # centres coincide at t = 4
    t_star = -cfg.X / cfg.v_x
    p1, _ = slit_densities(cfg, 0.0, t_star)
    assert total_intensity(cfg, 0.0, t_star) == pytest.approx(4 * p1, rel=1e-14)


def test_exact_destructive_node():
    cfg = default_cfg()
    t_star = -cfg.X / cfg.v_x
    node = (0 + 0.5) * np.pi / cfg.k_x
    assert abs(total_intensity(cfg, node, t_star)) <= 1e-12


def test_total_intensity_normalizes_to_one():
    cfg = default_cfg()
    field = normalize(intensity_field(cfg, make_grid(-15, 15, 4096), 2.0))
    assert abs(field.integral() - 1.0) <= 1e-9


def test_total_intensity_mirror_symmetric():
    cfg = default_cfg()
    x = np.linspace(-14, 14, 2001)
    for t in (0.0, 2.0, 5.0):
        forward = total_intensity(cfg, x, t)
        mirrored = total_intensity(cfg, -x, t)
        assert np.max(np.abs(forward - mirrored)) <= 1e-12 * forward.max()


def test_total_intensity_nonnegative_and_cosine_bounded():
    cfg = default_cfg()
    x = np.linspace(-15, 15, 4001)
    for t in (0.5, 2.0, 6.0):
        p1, p2 = slit_densities(cfg, x, t)
        p_tot = total_intensity(cfg, x, t)
        assert np.all(p_tot >= -1e-15)
        assert np.all(np.abs(p_tot - p1 - p2) <= 2 * np.sqrt(p1 * p2) + 1e-15)


def test_single_slit_reduction():
    cfg = default_cfg(amplitude_ratio=0.0)
    packet1, _ = slit_packets(cfg)
    x = np.linspace(-15, 15, 2001)
    for t in (0.0, 3.0):
        gap = total_intensity(cfg, x, t) - gaussian_density(packet1, x, t)
        assert np.max(np.abs(gap)) <= 1e-14


def test_intensity_matches_superposed_wavefunction_density():
    cfg = default_cfg()
    grid = make_grid(-15, 15, 4096)
    for t in (0.0, 2.0, 6.5):
        classical = ScalarField(grid, total_intensity(cfg, grid.points, t), t)
        quantum = ScalarField(grid, oracle.superposed_density(cfg, grid.points, t), t)
        bad = total_intensity(cfg, grid.points, t) <= 1e-12
        report = oracle.compare_fields(classical, quantum, 1e-8, where=~bad)
        assert report.passed, report


def test_normalize_is_idempotent_and_scale_invariant():
    grid = make_grid(-5, 5, 801)
    values = np.exp(-grid.points**2)
    once = normalize(ScalarField(grid, values, 0.0))
    twice = normalize(once)
    assert np.max(np.abs(twice.values - once.values)) <= 1e-12 * once.values.max()
    scaled = normalize(ScalarField(grid, 7.0 * values, 0.0))
    assert np.max(np.abs(scaled.values - once.values)) <= 1e-15 * once.values.max()


def test_normalize_rejects_zero_field():
    grid = make_grid(-1, 1, 16)
    with pytest.raises(ValidationError):
        normalize(ScalarField(grid, np.zeros(16), 0.0))


def test_dark_fringe_positions_unit_case():
    cfg = default_cfg(v_x=-0.5)
    nodes = dark_fringe_positions(cfg, 1)
    assert nodes[0] == pytest.approx(np.pi, rel=1e-15)
    assert nodes[1] == pytest.approx(3 * np.pi, rel=1e-15)


def test_dark_fringe_positions_need_drift():
    with pytest.raises(ValidationError):
        dark_fringe_positions(default_cfg(v_x=0.0), 3)


def test_find_extrema_locates_first_node():
    cfg = default_cfg()
    t_star = -cfg.X / cfg.v_x
    field = intensity_field(cfg, make_grid(-15, 15, 4096), t_star)
    report = find_extrema(field)
    positive_minima = np.sort(report.minima[report.minima > 0])
    assert abs(positive_minima[0] - np.pi) <= 0.01


def test_find_extrema_single_gaussian():
    cfg = default_cfg(amplitude_ratio=0.0)
    field = intensity_field(cfg, make_grid(-15, 15, 2049), 0.0)
    report = find_extrema(field)
    assert len(report.minima) == 0
    assert len(report.maxima) == 1
    assert report.maxima[0] == pytest.approx(cfg.X, abs=1e-6)


def test_find_extrema_constant_field():
    grid = make_grid(-1, 1, 64)
    report = find_extrema(ScalarField(grid, np.ones(64), 0.0))
    assert len(report.minima) == 0 and len(report.maxima) == 0
    assert report.visibility == 0.0


def test_find_extrema_requires_five_points():
    grid = make_grid(-1, 1, 4)
    with pytest.raises(ValidationError):
        find_extrema(ScalarField(grid, np.zeros(4), 0.0))


def test_extrema_interleave_and_visibility_in_range():
    cfg = default_cfg()
    field = intensity_field(cfg, make_grid(-15, 15, 4096), 2.0)
    report = find_extrema(field)
    merged = sorted(
        [(x, "min") for x in report.minima] + [(x, "max") for x in report.maxima]
    )
    kinds = [kind for _, kind in merged]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))
    assert 0.0 <= report.visibility <= 1.0


def test_visibility_is_one_at_perfect_nodes():
    cfg = default_cfg()
    t_star = -cfg.X / cfg.v_x
    report = find_extrema(intensity_field(cfg, make_grid(-15, 15, 4096), t_star))
    assert report.visibility == pytest.approx(1.0, abs=1e-6)


def test_modular_momentum_zero_cases():
    assert modular_momentum(0.0, 2.0, 1.0) == 0.0
    assert modular_momentum(0.5, 2.0, 1.0) == 0.0  # p equal to one period h/d


def test_modular_momentum_fractional_period():
    period = 1.0 / 2.0
    assert modular_momentum(1.3 * period, 2.0, 1.0) == pytest.approx(
        0.3 * period, abs=1e-12
    )


def test_modular_momentum_periodicity():
    period = 2 * np.pi / 4.0
    p = 0.37
    for n in range(-3, 4):
        assert modular_momentum(p + n * period, 4.0, 2 * np.pi) == pytest.approx(
            modular_momentum(p, 4.0, 2 * np.pi), abs=1e-12
        )


def test_modular_momentum_rejects_bad_distance():
    with pytest.raises(ValidationError):
        modular_momentum(1.0, 0.0, 1.0)
    with pytest.raises(ValidationError):
        modular_momentum(1.0, -2.0, 1.0)
