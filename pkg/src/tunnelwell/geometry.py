"""Physical constants and box-with-barrier geometry.

The model is a hard-walled interval [0, L] containing one rectangular
barrier of height ``barrier_height`` on [barrier_left, barrier_left +
barrier_width].  All lengths are in whatever unit the configuration uses;
only the constants object fixes the energy/time scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

_SPEED_OF_LIGHT_ANGSTROM_PER_S = 2.99792458e18


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar and particle mass in a self-consistent unit system.

    ``hbar`` is in energy*time and ``mass`` in energy*time^2/length^2, so
    that 2*mass*E/hbar^2 is a squared inverse length.
    """

    hbar: float
    mass: float

    def __post_init__(self):
        if not (self.hbar > 0.0) or not (self.mass > 0.0):
            raise ConfigError("hbar and mass must be positive")

    @property
    def inv_length2_per_energy(self) -> float:
        """2m/hbar^2: converts energy to squared wavenumber."""
        return 2.0 * self.mass / (self.hbar * self.hbar)

    def wavenumber(self, energy: float) -> float:
        """k = sqrt(2mE)/hbar for E >= 0."""
        if energy < 0.0:
            raise ValueError(f"energy must be non-negative, got {energy}")
        return math.sqrt(self.inv_length2_per_energy * energy)

    def energy(self, wavenumber: float) -> float:
        """Inverse of :meth:`wavenumber`."""
        return wavenumber * wavenumber / self.inv_length2_per_energy


def natural_constants() -> PhysicalConstants:
    """Default scales: hbar = 1, m = 1/2, so hbar^2/2m = 1 and E = k^2."""
    return PhysicalConstants(hbar=1.0, mass=0.5)


def paper_constants() -> PhysicalConstants:
    """Electron-scale constants: energies in eV, lengths in angstroms, times in seconds.

    hbar = 6.5821220e-16 eV*s; mass = 0.5109906 MeV/c^2 expressed in
    eV*s^2/A^2 via c = 2.99792458e18 A/s.  This gives hbar^2/2m = 3.8100 eV*A^2.
    """
    mass = 0.5109906e6 / _SPEED_OF_LIGHT_ANGSTROM_PER_S**2
    return PhysicalConstants(hbar=6.5821220e-16, mass=mass)


_PRESETS = {
    "natural": natural_constants,
    "paper": paper_constants,
}


def constants_preset(name: str) -> PhysicalConstants:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown constants preset {name!r}; choose from {sorted(_PRESETS)}"
        ) from None


@dataclass(frozen=True)
class WellGeometry:
    """Hard-walled box [0, total_length] with one inner rectangular barrier."""

    total_length: float
    barrier_left: float
    barrier_width: float
    barrier_height: float

    def __post_init__(self):
        L, c, b, v0 = (
            self.total_length,
            self.barrier_left,
            self.barrier_width,
            self.barrier_height,
        )
        for name, val in (
            ("total_length", L),
            ("barrier_left", c),
            ("barrier_width", b),
            ("barrier_height", v0),
        ):
            if not math.isfinite(val):
                raise ConfigError(f"{name} must be finite, got {val}")
        if L <= 0.0:
            raise ConfigError(f"total_length must be positive, got {L}")
        if b < 0.0:
            raise ConfigError(f"barrier_width must be non-negative, got {b}")
        if v0 < 0.0:
            raise ConfigError(f"barrier_height must be non-negative, got {v0}")
        if c < 0.0 or c + b > L:
            raise ConfigError(
                f"barrier [{c}, {c + b}] must lie inside the box [0, {L}]"
            )

    @classmethod
    def symmetric(
        cls, half_width: float, barrier_width: float, barrier_height: float
    ) -> "WellGeometry":
        """Chambers of equal width ``half_width`` on each side of the barrier."""
        return cls(
            total_length=2.0 * half_width + barrier_width,
            barrier_left=half_width,
            barrier_width=barrier_width,
            barrier_height=barrier_height,
        )

    @property
    def barrier_right(self) -> float:
        return self.barrier_left + self.barrier_width

    @property
    def left_width(self) -> float:
        return self.barrier_left

    @property
    def right_width(self) -> float:
        return self.total_length - self.barrier_right

    @property
    def is_symmetric(self) -> bool:
        return abs(self.left_width - self.right_width) <= 1e-12 * self.total_length

    @property
    def is_free_box(self) -> bool:
        return self.barrier_height == 0.0 or self.barrier_width == 0.0

    def region_edges(self) -> tuple[float, ...]:
        """Breakpoints of the piecewise potential, without duplicates."""
        edges = [0.0, self.barrier_left, self.barrier_right, self.total_length]
        out: list[float] = []
        for e in edges:
            if not out or e > out[-1]:
                out.append(e)
        return tuple(out)
