import numpy as np
import pytest

from slitsim import make_params
from slitsim.dispersion import (
    GaussianPacket,
    ballistic_diffusivity,
    delta_u_variance,
    gaussian_density,
    mean_square_displacement,
    osmotic_velocity,
    packet_velocity_field,
    sigma_t,
)
from slitsim.core import ValidationError
from slitsim import oracle

UNIT = make_params(1, 1, 1)
WIDE = make_params(1, 1, 2)


def complex_width_modulus(params, t):
    """Independent width oracle: modulus of the complex Gaussian width
    sigma0 (1 + i hbar t / 2 m sigma0^2)."""
    tau = params.hbar_eff * t / (2 * params.mass * params.sigma0**2)
    return abs(params.sigma0 * (1 + 1j * tau))


def test_sigma_starts_at_sigma0():
    assert sigma_t(UNIT, 0.0) == 1.0


def test_sigma_unit_packet_at_t2():
    assert sigma_t(UNIT, 2.0) == pytest.approx(np.sqrt(2.0), rel=1e-15)
    assert sigma_t(UNIT, 2.0) == pytest.approx(1.4142135623730951, rel=1e-15)
    assert sigma_t(UNIT, 2.0) == pytest.approx(complex_width_modulus(UNIT, 2.0), rel=1e-14)


def test_sigma_wide_packet_at_t2():
    assert sigma_t(WIDE, 2.0) == pytest.approx(2.0615528128088303, rel=1e-15)
    assert sigma_t(WIDE, 2.0) == pytest.approx(complex_width_modulus(WIDE, 2.0), rel=1e-14)


def test_sigma_is_even_in_time():
    assert sigma_t(UNIT, -3.5) == sigma_t(UNIT, 3.5)


@pytest.mark.parametrize("t", [0.1, 1.0, 7.0])
def test_variance_law(t):
    p = make_params(0.8, 1.1, 1.4)
    expected = p.sigma0**2 + p.diffusion_constant**2 * t**2 / p.sigma0**2
    assert sigma_t(p, t) ** 2 == pytest.approx(expected, rel=1e-12)


def test_ballistic_diffusivity_zero_at_emission():
    assert ballistic_diffusivity(UNIT, 0.0) == 0.0


def test_ballistic_diffusivity_unit_packet():
    # cross-check against the second closed form hbar^2 t / (4 m^2 sigma0^2)
    t = 4.0
    second_form = UNIT.hbar_eff**2 * t / (4 * UNIT.mass**2 * UNIT.sigma0**2)
    assert ballistic_diffusivity(UNIT, t) == pytest.approx(1.0, rel=1e-15)
    assert ballistic_diffusivity(UNIT, t) == pytest.approx(second_form, rel=1e-15)


def test_ballistic_diffusivity_wide_packet():
    t = 4.0
    second_form = WIDE.hbar_eff**2 * t / (4 * WIDE.mass**2 * WIDE.sigma0**2)
    assert ballistic_diffusivity(WIDE, t) == pytest.approx(0.25, rel=1e-15)
    assert ballistic_diffusivity(WIDE, t) == pytest.approx(second_form, rel=1e-15)


def test_ballistic_diffusivity_rejects_negative_time():
    with pytest.raises(ValidationError):
        ballistic_diffusivity(UNIT, -0.1)


def test_density_peak_value():
    packet = GaussianPacket(UNIT)
    assert gaussian_density(packet, 0.0, 0.0) == pytest.approx(
        1 / np.sqrt(2 * np.pi), rel=1e-15
    )


def test_density_one_sigma_point():
    packet = GaussianPacket(UNIT)
    assert gaussian_density(packet, 1.0, 0.0) == pytest.approx(
        np.exp(-0.5) / np.sqrt(2 * np.pi), rel=1e-15
    )


@pytest.mark.parametrize("params,t", [(UNIT, 0.0), (UNIT, 2.0), (WIDE, 5.0)])
def test_density_normalization_by_quadrature(params, t):
    packet = GaussianPacket(params, center0=0.3, drift=-0.2)
    sig = sigma_t(params, t)
    c = packet.center(t)
    x = np.linspace(c - 12 * sig, c + 12 * sig, 16001)
    integral = np.trapezoid(gaussian_density(packet, x, t), x)
    assert abs(integral - 1.0) <= 1e-10


def test_osmotic_velocity_vanishes_at_center():
    packet = GaussianPacket(UNIT, center0=0.7, drift=0.1)
    assert osmotic_velocity(packet, packet.center(3.0), 3.0) == 0.0


def finite_difference_osmotic(packet, x, t, step=1e-6):
    """Oracle: -(hbar/2m) d ln P / dx by central difference."""
    p = packet.params
    lo = np.log(gaussian_density(packet, x - step, t))
    hi = np.log(gaussian_density(packet, x + step, t))
    return -(p.hbar_eff / (2 * p.mass)) * (hi - lo) / (2 * step)


def test_osmotic_velocity_one_sigma_initial():
    packet = GaussianPacket(UNIT)
    assert osmotic_velocity(packet, 1.0, 0.0) == pytest.approx(0.5, abs=1e-12)
    assert osmotic_velocity(packet, 1.0, 0.0) == pytest.approx(
        finite_difference_osmotic(packet, 1.0, 0.0), abs=1e-6
    )


def test_osmotic_velocity_spread_packet():
    packet = GaussianPacket(UNIT)
    assert osmotic_velocity(packet, 1.0, 2.0) == pytest.approx(0.25, abs=1e-12)
    assert osmotic_velocity(packet, 1.0, 2.0) == pytest.approx(
        finite_difference_osmotic(packet, 1.0, 2.0), abs=1e-6
    )


def test_osmotic_velocity_is_odd_about_center():
    packet = GaussianPacket(UNIT, center0=0.0)
    x = np.linspace(-4, 4, 101)
    u = osmotic_velocity(packet, x, 1.5)
    assert np.allclose(u, -osmotic_velocity(packet, -x, 1.5), atol=0)


def test_packet_velocity_is_drift_at_t0():
    packet = GaussianPacket(UNIT, drift=0.3)
    x = np.linspace(-5, 5, 11)
    assert np.all(packet_velocity_field(packet, x, 0.0) == 0.3)


def test_packet_velocity_is_drift_at_center():
    packet = GaussianPacket(UNIT, center0=-1.0, drift=0.3)
    for t in (0.5, 2.0, 6.0):
        assert packet_velocity_field(packet, packet.center(t), t) == 0.3


def test_packet_velocity_matches_wavefunction_guidance():
    # offset of one width at t=2: 0.25 * 2 / 2 = 0.25, and it must agree with
    # the current/density ratio of the analytic wave packet
    packet = GaussianPacket(UNIT)
    value = packet_velocity_field(packet, 1.0, 2.0)
    assert value == pytest.approx(0.25, rel=1e-15)
    x = np.linspace(-6, 6, 501)
    psi = oracle.packet_wavefunction(packet, x, 2.0)
    dpsi = oracle.packet_wavefunction_gradient(packet, x, 2.0)
    guidance = np.imag(np.conj(psi) * dpsi) / np.abs(psi) ** 2
    assert np.max(np.abs(packet_velocity_field(packet, x, 2.0) - guidance)) < 1e-12


def test_delta_u_variance_zero_at_emission():
    assert delta_u_variance(UNIT, 0.0) == 0.0


def test_delta_u_variance_at_t2():
    recomputed = UNIT.u0**2 - UNIT.diffusion_constant**2 / sigma_t(UNIT, 2.0) ** 2
    assert delta_u_variance(UNIT, 2.0) == pytest.approx(0.125, rel=1e-14)
    assert delta_u_variance(UNIT, 2.0) == pytest.approx(recomputed, rel=1e-14)


def test_delta_u_variance_limit():
    assert delta_u_variance(UNIT, 1e9) == pytest.approx(UNIT.u0**2, rel=1e-9)


def test_delta_u_variance_nonnegative():
    for t in np.linspace(0, 20, 50):
        assert delta_u_variance(UNIT, t) >= 0


def test_mean_square_displacement_at_rest():
    assert mean_square_displacement(UNIT, 1.0, 0.0) == 1.0


def test_mean_square_displacement_values():
    assert mean_square_displacement(UNIT, 1.0, 2.0) == pytest.approx(2.0, rel=1e-15)
    assert mean_square_displacement(UNIT, 0.0, 4.0) == pytest.approx(4.0, rel=1e-15)


def test_mean_square_displacement_consistent_with_diffusivity():
    for t in (0.0, 0.7, 3.3):
        expected = 1.0 + ballistic_diffusivity(UNIT, t) * t
        assert mean_square_displacement(UNIT, 1.0, t) == expected


def test_density_weighted_osmotic_velocity_integrates_to_zero():
    # odd integrand about the centre; trapezoid over +-12 sigma
    packet = GaussianPacket(UNIT, center0=0.4)
    for t in (0.0, 2.5):
        sig = sigma_t(UNIT, t)
        c = packet.center(t)
        x = np.linspace(c - 12 * sig, c + 12 * sig, 8001)
        integrand = gaussian_density(packet, x, t) * osmotic_velocity(packet, x, t)
        assert abs(np.trapezoid(integrand, x)) <= 1e-10
