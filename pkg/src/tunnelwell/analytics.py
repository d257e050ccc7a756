"""Spectral analytics: level splitting, tunneling-time estimates, scans.

The closed forms here are the semiclassical companions to the exact solver:
the barrier action, the splitting it predicts for a symmetric double well,
and the standard time scales built from spectral gaps.  The scan helpers
sweep the barrier position and bundle per-position results for export.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, TunnelwellError
from .geometry import PhysicalConstants, WellGeometry
from .observables import time_series
from .packet import PacketSpec, project_packet
from .spectrum import Spectrum, solve_spectrum

__all__ = [
    "DegeneracyScan",
    "EntropyScan",
    "SplittingReport",
    "TunnelingTimes",
    "degeneracy_scan",
    "entropy_vs_position",
    "flag_near_degenerate",
    "instanton_action",
    "splitting_estimate",
    "splitting_report",
    "tunneling_time_estimates",
]

DEGENERACY_RATIO = 0.05


def instanton_action(geometry: WellGeometry, constants: PhysicalConstants) -> float:
    """Barrier action b * sqrt(2 m V0) of the tunneling path."""
    return geometry.barrier_width * math.sqrt(
        2.0 * constants.mass * geometry.barrier_height
    )


def splitting_estimate(
    geometry: WellGeometry, constants: PhysicalConstants, pair_energy: float
) -> float:
    """Semiclassical gap of a near-degenerate pair at energy ``pair_energy``.

    (4 E0 hbar / S0) * exp(-S0 / hbar) with S0 the barrier action; an
    asymptotic estimate, good to a factor of a few in the thick-barrier
    regime.
    """
    action = instanton_action(geometry, constants)
    if action == 0.0:
        raise ZeroDivisionError("estimate undefined for transparent barrier")
    hbar = constants.hbar
    return 4.0 * pair_energy * hbar / action * math.exp(-action / hbar)


@dataclass(frozen=True)
class SplittingReport:
    """Measured vs estimated gap for one near-degenerate pair."""

    pair_index: int
    e_lower: float
    e_upper: float
    gap: float
    estimated_gap: float
    instanton_action: float


def splitting_report(spectrum: Spectrum, pair_index: int = 0) -> SplittingReport:
    """Compare the solved gap of pair ``pair_index`` with the closed form.

    Pair k means levels (2k, 2k+1); the unperturbed energy entering the
    estimate is the pair mean.
    """
    lo, hi = 2 * pair_index, 2 * pair_index + 1
    if hi >= len(spectrum):
        raise ValueError(
            f"pair {pair_index} needs {hi + 1} levels, spectrum has {len(spectrum)}"
        )
    e_lower = spectrum.states[lo].energy
    e_upper = spectrum.states[hi].energy
    mean = 0.5 * (e_lower + e_upper)
    return SplittingReport(
        pair_index=pair_index,
        e_lower=e_lower,
        e_upper=e_upper,
        gap=e_upper - e_lower,
        estimated_gap=splitting_estimate(spectrum.geometry, spectrum.constants, mean),
        instanton_action=instanton_action(spectrum.geometry, spectrum.constants),
    )


@dataclass(frozen=True)
class TunnelingTimes:
    """Three standard tunneling time scales.

    pair_beat: pi*hbar over the lowest pair gap, the side-to-side shuttle
    time.  quadratic_bound: 25*hbar/(e_res - e_th), how long the survival
    probability can stay in its at-most-quadratic decay phase.
    exponential_onset: 2*pi/(e_res - e_th) as printed in the source
    formula, which omits hbar; pass insert_hbar=True to restore it.
    """

    pair_beat: float
    quadratic_bound: float
    exponential_onset: float


def tunneling_time_estimates(
    spectrum: Spectrum,
    e_res: float,
    e_th: float,
    insert_hbar: bool = False,
) -> TunnelingTimes:
    if len(spectrum) < 2:
        raise ValueError("need at least two levels for a pair gap")
    if e_res <= e_th:
        raise ValueError(f"e_res ({e_res}) must exceed e_th ({e_th})")
    hbar = spectrum.constants.hbar
    gap = spectrum.states[1].energy - spectrum.states[0].energy
    if gap <= spectrum.root_tolerance:
        warnings.warn(
            "lowest pair is degenerate to solver tolerance; beat time is infinite",
            stacklevel=2,
        )
        beat = math.inf
    else:
        beat = math.pi * hbar / gap
    window = e_res - e_th
    onset = 2.0 * math.pi / window
    if insert_hbar:
        onset *= hbar
    return TunnelingTimes(
        pair_beat=beat,
        quadratic_bound=25.0 * hbar / window,
        exponential_onset=onset,
    )


@dataclass(frozen=True, eq=False)
class DegeneracyScan:
    """Near-degeneracy bookkeeping across barrier positions.

    Failed positions carry an error message instead of profiles; their
    entries in the profile tuples are None.
    """

    positions: tuple[float, ...]
    energy_profiles: tuple
    gap_profiles: tuple
    near_degenerate_flags: tuple
    errors: tuple

    def flagged_count(self, i: int) -> int:
        flags = self.near_degenerate_flags[i]
        return 0 if flags is None else int(np.sum(flags))


def _local_mean_spacing(gaps: np.ndarray, i: int) -> float:
    """Mean of up to four gaps surrounding gap i, excluding i itself."""
    picks = [j for j in (i - 2, i - 1, i + 1, i + 2) if 0 <= j < gaps.size]
    return float(np.mean(gaps[picks]))


def flag_near_degenerate(energies: np.ndarray, ratio: float = DEGENERACY_RATIO) -> np.ndarray:
    """Boolean flag per gap: True where a gap collapses well below its neighbors."""
    gaps = np.diff(energies)
    flags = np.zeros(gaps.size, dtype=bool)
    for i in range(gaps.size):
        flags[i] = gaps[i] < ratio * _local_mean_spacing(gaps, i)
    return flags


def _displaced(base: WellGeometry, position: float) -> WellGeometry:
    if not (0.0 < position and position + base.barrier_width < base.total_length):
        raise ConfigError(
            f"barrier position {position} leaves no chamber on one side"
        )
    return WellGeometry(
        total_length=base.total_length,
        barrier_left=position,
        barrier_width=base.barrier_width,
        barrier_height=base.barrier_height,
    )


def degeneracy_scan(
    base: WellGeometry,
    constants: PhysicalConstants,
    positions,
    n_levels: int = 30,
    degeneracy_ratio: float = DEGENERACY_RATIO,
) -> DegeneracyScan:
    """Solve the spectrum at each barrier position and flag tight pairs.

    A gap is flagged when it is below ``degeneracy_ratio`` times the mean
    of its four surrounding gaps.  Solver failures are recorded per
    position; the scan always completes.
    """
    pos = tuple(float(p) for p in positions)
    energies, gaps, flags, errors = [], [], [], []
    for p in pos:
        geometry = _displaced(base, p)
        try:
            spectrum = solve_spectrum(geometry, constants, n_levels, normalize=False)
        except TunnelwellError as exc:
            energies.append(None)
            gaps.append(None)
            flags.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")
            continue
        e = np.array(spectrum.energies)
        e.flags.writeable = False
        g = np.diff(e)
        g.flags.writeable = False
        f = flag_near_degenerate(e, degeneracy_ratio)
        f.flags.writeable = False
        energies.append(e)
        gaps.append(g)
        flags.append(f)
        errors.append(None)
    return DegeneracyScan(
        positions=pos,
        energy_profiles=tuple(energies),
        gap_profiles=tuple(gaps),
        near_degenerate_flags=tuple(flags),
        errors=tuple(errors),
    )


@dataclass(frozen=True, eq=False)
class EntropyScan:
    """Entropy time series per barrier position."""

    positions: tuple[float, ...]
    times: np.ndarray
    entropies: tuple
    errors: tuple


def entropy_vs_position(
    base: WellGeometry,
    constants: PhysicalConstants,
    packet: PacketSpec,
    positions,
    times,
    n_levels: int = 30,
    entropy_resolution: int = 512,
) -> EntropyScan:
    """Full solve-project-evolve entropy series at each barrier position."""
    pos = tuple(float(p) for p in positions)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    for p in pos:
        if packet.center >= p:
            raise ConfigError(
                f"packet center {packet.center} is not inside the left chamber "
                f"for barrier position {p}"
            )
    series, errors = [], []
    for p in pos:
        geometry = _displaced(base, p)
        try:
            spectrum = solve_spectrum(geometry, constants, n_levels)
            field = project_packet(spectrum, packet)
            bundle = time_series(field, ts, entropy_resolution=entropy_resolution)
        except TunnelwellError as exc:
            series.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")
            continue
        series.append(bundle.entropy)
        errors.append(None)
    return EntropyScan(positions=pos, times=ts, entropies=tuple(series), errors=tuple(errors))
