"""Single free Gaussian packet: spreading width, density and velocity fields.

All formulas are closed-form; there is no numerical differentiation on any
production path.  The packet width obeys

    sigma(t)^2 = sigma0^2 + (u0 t)^2 = sigma0^2 (1 + D^2 t^2 / sigma0^4),

which makes the mean-square displacement grow ballistically, x2(t) =
x2(0) + u0^2 t^2, equivalent to ordinary diffusion with the time-dependent
diffusivity D_t(t) = u0^2 t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysicalParams, SlitConfig, ValidationError


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian density of initial width sigma0 whose centre moves at `drift`."""

    params: PhysicalParams
    center0: float = 0.0
    drift: float = 0.0

    def center(self, t):
        return self.center0 + self.drift * t


def slit_packets(cfg: SlitConfig) -> tuple[GaussianPacket, GaussianPacket]:
    """The two mirror-image channel packets of a slit configuration."""
    packet1 = GaussianPacket(cfg.params, center0=+cfg.X, drift=+cfg.v_x)
    packet2 = GaussianPacket(cfg.params, center0=-cfg.X, drift=-cfg.v_x)
    return packet1, packet2


def packet_variance(params: PhysicalParams, t):
    """sigma(t)^2 = sigma0^2 + (u0 t)^2; even in t."""
    return params.sigma0**2 + (params.u0 * t) ** 2


def sigma_t(params: PhysicalParams, t):
    """Packet width sigma(t) = sigma0 sqrt(1 + D^2 t^2 / sigma0^4)."""
    return np.sqrt(packet_variance(params, t))


def ballistic_diffusivity(params: PhysicalParams, t):
    """Time-dependent diffusivity D_t(t) = u0^2 t = hbar^2 t / (4 m^2 sigma0^2).

    The diffusivity is a post-emission history, so t must be non-negative.
    """
    if np.any(np.asarray(t) < 0):
        raise ValidationError(f"diffusivity requires t >= 0, got {t!r}")
    return params.u0**2 * t


def gaussian_density(packet: GaussianPacket, x, t):
    """Normalized density exp(-(x - c(t))^2 / 2 sigma^2) / (sqrt(2 pi) sigma)."""
    var = packet_variance(packet.params, t)
    dxc = x - packet.center(t)
    return np.exp(-dxc**2 / (2.0 * var)) / np.sqrt(2.0 * np.pi * var)


def osmotic_velocity(packet: GaussianPacket, x, t):
    """Outward diffusive velocity u+ = -(hbar/2m) grad P / P = D (x - c) / sigma^2.

    The opposing branch is u- = -u+.
    """
    var = packet_variance(packet.params, t)
    return packet.params.diffusion_constant * (x - packet.center(t)) / var


def packet_velocity_field(packet: GaussianPacket, x, t):
    """Total transport velocity v_tot = drift + (x - c(t)) u0^2 t / sigma(t)^2.

    The second term is the dispersion flow of the spreading packet; it equals
    the guidance velocity J/P of a free Gaussian wave packet.
    """
    var = packet_variance(packet.params, t)
    return packet.drift + (x - packet.center(t)) * packet.params.u0**2 * t / var


def delta_u_variance(params: PhysicalParams, t):
    """Mean-square velocity fluctuation u0^2 - D^2 / sigma(t)^2.

    Zero at emission, tending to u0^2 as the packet spreads.
    """
    return params.u0**2 - params.diffusion_constant**2 / packet_variance(params, t)


def mean_square_displacement(params: PhysicalParams, x0_sq, t):
    """Ballistic moment law x2(t) = x2(0) + u0^2 t^2, built as x2(0) + D_t(t) t."""
    return x0_sq + ballistic_diffusivity(params, t) * t
