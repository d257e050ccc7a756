"""Gaussian packets and their expansion over the well's bound states.

A packet released in the left chamber is projected onto the solved spectrum
once; every later quantity (densities, leak probabilities, entropy, moments)
is evaluated from the expansion coefficients, so time evolution is exact up
to the quality of the projection.  The share of the packet captured by the
truncated basis is tracked explicitly as ``captured_norm``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ProjectionError
from .geometry import WellGeometry
from .quadrature import oscillation_nodes
from .spectrum import Spectrum, eigenfunction_eval

__all__ = [
    "PacketSpec",
    "WaveField",
    "initial_wavefunction",
    "project_packet",
    "wavefunction_at",
    "density_profile",
    "energy_expectation",
]

CAPTURE_WARN = 0.999
CAPTURE_FAIL = 0.9


@dataclass(frozen=True)
class PacketSpec:
    """A normalized Gaussian: center x0, spatial width sigma, mean momentum k0.

    The amplitude is (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2/(4 sigma^2))
    exp(i k0 (x-x0)), so |psi|^2 has standard deviation sigma.
    """

    center: float
    width: float
    momentum: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.momentum)):
            raise ConfigError("packet center and momentum must be finite")
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ConfigError(f"packet width must be positive, got {self.width}")


def initial_wavefunction(packet: PacketSpec, x) -> np.ndarray:
    """The packet's t = 0 amplitude, before any projection."""
    xs = np.asarray(x, dtype=float)
    norm = (2.0 * math.pi * packet.width**2) ** -0.25
    arg = (xs - packet.center) / (2.0 * packet.width)
    phase = packet.momentum * (xs - packet.center)
    return norm * np.exp(-arg * arg) * (np.cos(phase) + 1j * np.sin(phase))


@dataclass(frozen=True)
class WaveField:
    """A packet expanded over eigenstates: the simulation's working object."""

    spectrum: Spectrum
    packet: PacketSpec
    coefficients: tuple[complex, ...]
    captured_norm: float

    def __len__(self) -> int:
        return len(self.coefficients)

    @property
    def coefficient_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)

    @property
    def energies(self) -> np.ndarray:
        return self.spectrum.energies


def _projection_nodes(field_k: float, packet: PacketSpec, geometry: WellGeometry):
    """Region-aligned Gauss nodes resolving both the sines and the Gaussian."""
    k_eff = abs(field_k) + abs(packet.momentum) + 2.0 / packet.width
    xs_list, ws_list = [], []
    edges = geometry.region_edges()
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = oscillation_nodes(lo, hi, k_eff)
        xs_list.append(x)
        ws_list.append(w)
    return np.concatenate(xs_list), np.concatenate(ws_list)


def project_packet(spectrum: Spectrum, packet: PacketSpec) -> WaveField:
    """Expand the packet over the spectrum's states.

    Warns when the packet's 3 sigma core touches a wall (reflection artifacts
    contaminate early dynamics) and when the captured norm drops below 0.999;
    a capture below 0.9 means the basis misses too much of the packet to
    evolve it honestly and raises :class:`ProjectionError`.
    """
    geometry = spectrum.geometry
    L = geometry.total_length
    if not (0.0 < packet.center < L):
        raise ConfigError(
            f"packet center {packet.center} is outside the box (0, {L})"
        )
    if packet.center - 3.0 * packet.width < 0.0 or packet.center + 3.0 * packet.width > L:
        warnings.warn(
            "packet core (center +- 3 sigma) touches a wall; the projected "
            "state will differ visibly from the free Gaussian",
            stacklevel=2,
        )

    k_top = max(s.wavenumber for s in spectrum.states)
    xs, ws = _projection_nodes(k_top, packet, geometry)
    psi0 = initial_wavefunction(packet, xs)
    weighted = ws * psi0
    coeffs = np.array(
        [eigenfunction_eval(s, geometry, xs) @ weighted for s in spectrum.states]
    )
    captured = float(np.sum(np.abs(coeffs) ** 2))
    if captured < CAPTURE_FAIL:
        raise ProjectionError(
            f"only {captured:.3f} of the packet norm lands in the first "
            f"{len(spectrum)} states; add levels or widen the packet"
        )
    if captured < CAPTURE_WARN:
        warnings.warn(
            f"captured norm {captured:.6f} < {CAPTURE_WARN}; high-energy tails "
            "are being truncated",
            stacklevel=2,
        )
    return WaveField(
        spectrum=spectrum,
        packet=packet,
        coefficients=tuple(coeffs.tolist()),
        captured_norm=captured,
    )


def _phases(field: WaveField, t: float) -> np.ndarray:
    hbar = field.spectrum.constants.hbar
    return np.exp(-1j * field.energies * (t / hbar))


def wavefunction_at(field: WaveField, x, t: float) -> np.ndarray:
    """Complex amplitude at positions ``x`` and time ``t``.

    The overall phase follows the energy zero of the solved spectrum; only
    phase differences are physical.
    """
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    modes = np.vstack(
        [eigenfunction_eval(s, field.spectrum.geometry, xs) for s in field.spectrum.states]
    )
    amp = (field.coefficient_array * _phases(field, t)) @ modes
    return amp[0] if scalar else amp


def density_profile(field: WaveField, x, t: float) -> np.ndarray:
    """|Psi(x, t)|^2 on the given positions."""
    amp = wavefunction_at(field, x, t)
    return np.real(amp * np.conj(amp))


def energy_expectation(field: WaveField) -> float:
    """Mean energy of the captured part, normalized by the captured norm."""
    weights = np.abs(field.coefficient_array) ** 2
    return float(weights @ field.energies / field.captured_norm)
