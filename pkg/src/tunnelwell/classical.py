"""Classical bouncing-packet baseline and the quantum divergence clock.

The classical reference is a rigid Gaussian probability density translating
at constant velocity inside the left chamber [0, a).  It does not spread and
it does not tunnel; reflection off the chamber wall is handled by mirror
images.  Divergence from the quantum packet is measured on the position
variance (or RMS width) and reported as the first threshold crossing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .observables import position_moments
from .packet import WaveField
from .quadrature import panel_nodes

__all__ = [
    "ClassicalPacket",
    "DivergenceResult",
    "classical_density",
    "classical_variance",
    "divergence_time",
    "matched_packet",
]

_TERM_CUTOFF = 1e-12


@dataclass(frozen=True)
class ClassicalPacket:
    """Rigid Gaussian density bouncing inside [0, wall)."""

    center: float
    width: float
    velocity: float
    wall: float

    def __post_init__(self):
        if not (0.0 < self.center < self.wall):
            raise ConfigError(
                f"classical packet center {self.center} outside (0, {self.wall})"
            )
        if self.width <= 0.0:
            raise ConfigError(f"classical packet width must be positive, got {self.width}")


def matched_packet(field: WaveField) -> ClassicalPacket:
    """Classical packet sharing the quantum field's center, width and velocity."""
    constants = field.spectrum.constants
    packet = field.packet
    return ClassicalPacket(
        center=packet.center,
        width=packet.width,
        velocity=constants.hbar * packet.momentum / constants.mass,
        wall=field.spectrum.geometry.barrier_left,
    )


def _gaussian(u: np.ndarray, width: float) -> np.ndarray:
    norm = 1.0 / math.sqrt(2.0 * math.pi * width * width)
    return norm * np.exp(-0.5 * (u / width) ** 2)


def _density_grid(packet: ClassicalPacket, x: np.ndarray, t: np.ndarray, mode: str):
    """Density on the (time x position) grid; zero outside [0, wall)."""
    a = packet.wall
    center = packet.center + packet.velocity * t[:, None]
    xg = x[None, :]
    if mode == "two-term":
        dens = _gaussian(xg - center, packet.width) + _gaussian(
            xg - 2.0 * a + center, packet.width
        )
    elif mode == "full":
        # fold the unreflected center into one period so image count stays
        # bounded no matter how far the packet has traveled
        folded = np.mod(center, 2.0 * a)
        dens = np.zeros(np.broadcast_shapes(folded.shape, xg.shape))
        peak = 1.0 / math.sqrt(2.0 * math.pi) / packet.width
        for shell in range(16):
            added = np.zeros_like(dens)
            for n in (-shell, shell) if shell else (0,):
                pos = 2.0 * n * a
                added += _gaussian(xg - pos - folded, packet.width)
                added += _gaussian(xg - pos + folded, packet.width)
            dens += added
            if shell and float(np.max(added)) < _TERM_CUTOFF * peak:
                break
        else:
            raise ConfigError("image sum failed to converge; wall spacing too small")
    else:
        raise ValueError(f"unknown density mode {mode!r}")
    return np.where((xg >= 0.0) & (xg < a), dens, 0.0)


def classical_density(packet: ClassicalPacket, x, t: float = 0.0, mode: str = "two-term"):
    """Bouncing-Gaussian probability density at position(s) x and time t.

    ``two-term`` is the direct image plus its single mirror about the wall,
    valid until the packet would reflect a second time; ``full`` sums the
    period-2a image set until extra terms fall below 1e-12 of the peak.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    dens = _density_grid(packet, xs, np.array([float(t)]), mode)[0]
    return dens if np.ndim(x) else float(dens[0])


def _moment_nodes(packet: ClassicalPacket):
    panels = max(16, int(math.ceil(8.0 * packet.wall / packet.width)))
    return panel_nodes(0.0, packet.wall, panels)


def classical_variance(packet: ClassicalPacket, t, mode: str = "two-term"):
    """Position variance of the chamber-restricted density.

    Moments are normalized by the mass currently inside [0, wall) so the
    two-term mode stays meaningful while its tails leak.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    xs, ws = _moment_nodes(packet)
    dens = _density_grid(packet, xs, times, mode)
    mass = dens @ ws
    if float(np.min(mass)) <= 0.0:
        raise ConfigError("classical density carries no mass inside the chamber")
    mean = (dens @ (ws * xs)) / mass
    second = (dens @ (ws * xs * xs)) / mass
    var = second - mean * mean
    return var if np.ndim(t) else float(var[0])


@dataclass(frozen=True, eq=False)
class DivergenceResult:
    """Outcome of the quantum-vs-classical variance comparison."""

    t_star: float | None
    reached: bool
    metric: str
    threshold: float
    times: np.ndarray
    quantum_variance: np.ndarray
    classical_variance: np.ndarray
    difference: np.ndarray


def _check_matched(field: WaveField, packet: ClassicalPacket) -> None:
    want = matched_packet(field)
    scale = max(1.0, abs(want.velocity))
    if (
        abs(packet.center - want.center) > 1e-9
        or abs(packet.width - want.width) > 1e-9
        or abs(packet.wall - want.wall) > 1e-9
        or abs(packet.velocity - want.velocity) > 1e-9 * scale
    ):
        raise ConfigError(
            "classical packet does not match the quantum one: expected "
            f"center={want.center}, width={want.width}, velocity={want.velocity}, "
            f"wall={want.wall}"
        )


def divergence_time(
    field: WaveField,
    packet: ClassicalPacket,
    times,
    threshold: float,
    metric: str = "variance",
    mode: str = "two-term",
) -> DivergenceResult:
    """First time the quantum and classical packets disagree by ``threshold``.

    ``metric`` selects the gap definition: "variance" compares position
    variances directly, "rms" compares their square roots.  The crossing is
    located by linear interpolation between the bracketing samples.
    """
    if metric not in ("variance", "rms"):
        raise ValueError(f"unknown metric {metric!r}")
    if threshold <= 0.0:
        raise ConfigError(f"threshold must be positive, got {threshold}")
    _check_matched(field, packet)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    if ts.size < 2 or ts[0] != 0.0 or np.any(np.diff(ts) <= 0.0):
        raise ConfigError("times must increase strictly from 0")

    _, var_qm = position_moments(field, ts)
    var_cl = classical_variance(packet, ts, mode=mode)
    if metric == "rms":
        gap = np.abs(np.sqrt(np.maximum(var_qm, 0.0)) - np.sqrt(np.maximum(var_cl, 0.0)))
    else:
        gap = np.abs(var_qm - var_cl)

    t_star = None
    hits = np.nonzero(gap >= threshold)[0]
    if hits.size:
        i = int(hits[0])
        if i == 0:
            t_star = float(ts[0])
        else:
            frac = (threshold - gap[i - 1]) / (gap[i] - gap[i - 1])
            t_star = float(ts[i - 1] + frac * (ts[i] - ts[i - 1]))
    return DivergenceResult(
        t_star=t_star,
        reached=t_star is not None,
        metric=metric,
        threshold=float(threshold),
        times=ts,
        quantum_variance=var_qm,
        classical_variance=var_cl,
        difference=gap,
    )
