"""Independent quantum-mechanical reference for the real-valued modules.

Implements the textbook analytic free Gaussian wave packet with complex width

    psi(x, t) = (2 pi sigma0^2)^(-1/4) (1 + i tau)^(-1/2)
                * exp( -(x - c)^2 (1 - i tau) / (4 sigma(t)^2)
                       + i (m v / hbar) (x - x0 - v t / 2) ),

with tau = hbar t / (2 m sigma0^2) and c = x0 + v t, plus the superposition
density |psi1 + psi2|^2 and the probability current
J = (1/m) Re{ psi* (-i hbar d/dx) psi } with analytic spatial gradients.
These are computed entirely in the complex representation, independent of the
real-valued field formulas they certify.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ScalarField, SlitConfig, ValidationError
from .dispersion import GaussianPacket, slit_packets

# Complex amplitudes are plain numpy complex128 values/arrays throughout.


def _tau(packet: GaussianPacket, t):
    p = packet.params
    return p.hbar_eff * t / (2.0 * p.mass * p.sigma0**2)


def packet_wavefunction(packet: GaussianPacket, x, t):
    """Normalized free Gaussian wavefunction; |psi|^2 has width sigma(t)."""
    p = packet.params
    tau = _tau(packet, t)
    var = p.sigma0**2 * (1.0 + tau**2)
    c = packet.center(t)
    prefactor = (2.0 * np.pi * p.sigma0**2) ** (-0.25) / np.sqrt(1.0 + 1j * tau)
    carrier = (p.mass * packet.drift / p.hbar_eff) * (
        x - packet.center0 - packet.drift * t / 2.0
    )
    return prefactor * np.exp(
        -((x - c) ** 2) * (1.0 - 1j * tau) / (4.0 * var) + 1j * carrier
    )


def packet_wavefunction_gradient(packet: GaussianPacket, x, t):
    """Analytic d psi / dx (no numerical differentiation)."""
    p = packet.params
    tau = _tau(packet, t)
    var = p.sigma0**2 * (1.0 + tau**2)
    log_derivative = (
        -(x - packet.center(t)) * (1.0 - 1j * tau) / (2.0 * var)
        + 1j * p.mass * packet.drift / p.hbar_eff
    )
    return packet_wavefunction(packet, x, t) * log_derivative


def superposed_wavefunction(cfg: SlitConfig, x, t):
    """a1 psi1 + a2 psi2 for the two channel packets."""
    a1, a2 = cfg.amplitudes
    packet1, packet2 = slit_packets(cfg)
    return a1 * packet_wavefunction(packet1, x, t) + a2 * packet_wavefunction(
        packet2, x, t
    )


def superposed_density(cfg: SlitConfig, x, t):
    """|a1 psi1 + a2 psi2|^2 (unnormalized, like the real-valued intensity)."""
    psi = superposed_wavefunction(cfg, x, t)
    return np.abs(psi) ** 2


def quantum_current(cfg: SlitConfig, x, t):
    """Probability current (hbar/m) Im{ psi* d psi/dx } of the superposition."""
    a1, a2 = cfg.amplitudes
    packet1, packet2 = slit_packets(cfg)
    psi = a1 * packet_wavefunction(packet1, x, t) + a2 * packet_wavefunction(
        packet2, x, t
    )
    dpsi = a1 * packet_wavefunction_gradient(packet1, x, t) + (
        a2 * packet_wavefunction_gradient(packet2, x, t)
    )
    p = cfg.params
    return (p.hbar_eff / p.mass) * np.imag(np.conj(psi) * dpsi)


def bohmian_velocity(cfg: SlitConfig, x, t):
    """Guidance velocity J / |psi|^2; caller is responsible for masking nodes."""
    return quantum_current(cfg, x, t) / superposed_density(cfg, x, t)


def phase_difference(cfg: SlitConfig, x, t):
    """arg psi1 - arg psi2, each wrapped to (-pi, pi]."""
    packet1, packet2 = slit_packets(cfg)
    return np.angle(packet_wavefunction(packet1, x, t)) - np.angle(
        packet_wavefunction(packet2, x, t)
    )


@dataclass(frozen=True)
class FieldComparison:
    """Result of comparing two sampled fields point by point."""

    max_deviation: float
    x_worst: float
    time: float
    passed: bool
    n_compared: int
    scale: float


def compare_fields(
    a: ScalarField,
    b: ScalarField,
    rel_tol: float,
    mask_floor: float = 0.0,
    where=None,
) -> FieldComparison:
    """Largest |a - b| relative to the compared fields' peak magnitude.

    Points where max(|a|, |b|) <= mask_floor * peak are excluded, as are
    points where the optional boolean array `where` is False.  The deviation
    is normalized by the peak of max(|a|, |b|) over the compared points, so
    it is insensitive to isolated zero crossings of the fields themselves.
    """
    if a.grid != b.grid:
        raise ValidationError("compare_fields requires identical grids")
    if a.time != b.time:
        raise ValidationError(
            f"compare_fields requires equal times, got {a.time} and {b.time}"
        )
    magnitude = np.maximum(np.abs(a.values), np.abs(b.values))
    selected = magnitude > mask_floor * magnitude.max()
    if where is not None:
        selected &= np.asarray(where, dtype=bool)
    if not np.any(selected):
        return FieldComparison(0.0, float("nan"), a.time, True, 0, 0.0)
    scale = float(magnitude[selected].max())
    deviation = np.abs(a.values - b.values)
    deviation[~selected] = 0.0
    worst = int(np.argmax(deviation))
    max_dev = float(deviation[worst] / scale) if scale > 0 else 0.0
    return FieldComparison(
        max_deviation=max_dev,
        x_worst=float(a.grid.points[worst]),
        time=a.time,
        passed=max_dev <= rel_tol,
        n_compared=int(np.count_nonzero(selected)),
        scale=scale,
    )
