"""Time-dependent measurements on an evolving packet.

Everything reduces to quadratic forms z(t)^H M z(t) where z(t) are the phased
expansion coefficients and M is a time-independent matrix of eigenfunction
integrals.  The matrices are computed once per spectrum (cached on the frozen
Spectrum value) so long time series cost one small matrix product per sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError
from .packet import WaveField
from .quadrature import oscillation_nodes, panel_nodes
from .spectrum import Spectrum, eigenfunction_eval

__all__ = [
    "TimeSeries",
    "region_overlap",
    "rhs_probability",
    "spatial_entropy",
    "position_moments",
    "time_series",
]

_IM_TOLERANCE = 1e-9
_ENTROPY_MIN_PANELS = 256


def _segments(spectrum: Spectrum, lo: float, hi: float):
    cuts = [lo] + [e for e in spectrum.geometry.region_edges() if lo < e < hi] + [hi]
    return zip(cuts[:-1], cuts[1:])


def _mode_matrix(spectrum: Spectrum, xs: np.ndarray) -> np.ndarray:
    return np.vstack(
        [eigenfunction_eval(s, spectrum.geometry, xs) for s in spectrum.states]
    )


@lru_cache(maxsize=64)
def _overlap_matrix(spectrum: Spectrum, lo: float, hi: float, power: int) -> np.ndarray:
    """Integrals of x^power psi_m psi_n over [lo, hi], exactly symmetric."""
    k_top = 2.0 * max(s.wavenumber for s in spectrum.states)
    n = len(spectrum)
    out = np.zeros((n, n))
    for seg_lo, seg_hi in _segments(spectrum, lo, hi):
        xs, ws = oscillation_nodes(seg_lo, seg_hi, k_top)
        phi = _mode_matrix(spectrum, xs)
        w_eff = ws * xs**power if power else ws
        a = (phi * w_eff) @ phi.T
        out += 0.5 * (a + a.T)
    out.flags.writeable = False
    return out


def region_overlap(spectrum: Spectrum, lo: float, hi: float) -> np.ndarray:
    """Matrix of integrals of psi_m psi_n over [lo, hi]."""
    L = spectrum.geometry.total_length
    if not (0.0 <= lo < hi <= L):
        raise ValueError(f"region [{lo}, {hi}] must be inside [0, {L}]")
    return _overlap_matrix(spectrum, float(lo), float(hi), 0)


def _phased_coefficients(field: WaveField, times: np.ndarray) -> np.ndarray:
    hbar = field.spectrum.constants.hbar
    phases = np.exp(-1j * np.outer(times / hbar, field.energies))
    return phases * field.coefficient_array


def _quadratic_form(z: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    vals = np.einsum("tm,mn,tn->t", z.conj(), matrix, z)
    worst = float(np.max(np.abs(vals.imag), initial=0.0))
    if worst > _IM_TOLERANCE * max(1.0, float(np.max(np.abs(vals.real), initial=0.0))):
        raise ConsistencyError(
            f"observable came out complex (|imag| up to {worst:.3e}); "
            "the overlap matrix or coefficients are corrupted"
        )
    return vals.real


def _auto_rhs_region(spectrum: Spectrum) -> tuple[float, float]:
    geometry = spectrum.geometry
    return geometry.barrier_right, geometry.total_length


def rhs_probability(field: WaveField, t, region=None) -> np.ndarray | float:
    """Probability of finding the particle right of the barrier.

    ``region`` defaults to the right chamber [c+b, L]; pass an explicit
    (lo, hi) to override.  Clamped to [0, captured_norm] against round-off;
    a violation beyond round-off scale raises :class:`ConsistencyError`.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    spectrum = field.spectrum
    lo, hi = _auto_rhs_region(spectrum) if region is None else region
    m = region_overlap(spectrum, lo, hi)
    vals = _quadratic_form(_phased_coefficients(field, times), m)
    top = field.captured_norm
    if float(np.min(vals)) < -_IM_TOLERANCE or float(np.max(vals)) > top + _IM_TOLERANCE:
        raise ConsistencyError(
            f"right-hand probability left [0, {top}] by more than round-off"
        )
    vals = np.clip(vals, 0.0, top)
    return vals if np.ndim(t) else float(vals[0])


@lru_cache(maxsize=32)
def _entropy_grid(spectrum: Spectrum, resolution: int):
    """Region-aligned composite Gauss panels plus the mode matrix on them."""
    geometry = spectrum.geometry
    L = geometry.total_length
    xs_list, ws_list = [], []
    edges = geometry.region_edges()
    for lo, hi in zip(edges[:-1], edges[1:]):
        panels = max(8, int(round(resolution * (hi - lo) / L)))
        x, w = panel_nodes(lo, hi, panels)
        xs_list.append(x)
        ws_list.append(w)
    xs = np.concatenate(xs_list)
    ws = np.concatenate(ws_list)
    phi = _mode_matrix(spectrum, xs)
    for arr in (xs, ws, phi):
        arr.flags.writeable = False
    return xs, ws, phi


def _entropy_from_modes(z: np.ndarray, phi: np.ndarray, ws: np.ndarray) -> np.ndarray:
    amp = z @ phi
    dens = amp.real**2 + amp.imag**2
    plogp = np.where(dens > 0.0, dens * np.log(np.where(dens > 0.0, dens, 1.0)), 0.0)
    return -(plogp @ ws)


def spatial_entropy(field: WaveField, t, resolution: int = _ENTROPY_MIN_PANELS):
    """Differential entropy -integral of rho ln rho of the position density.

    Computed from the raw (non-renormalized) density of the captured part;
    0 ln 0 counts as 0.  ``resolution`` sets the number of 8-point Gauss
    panels across the box, floored at 256.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    _, ws, phi = _entropy_grid(field.spectrum, max(int(resolution), _ENTROPY_MIN_PANELS))
    vals = _entropy_from_modes(_phased_coefficients(field, times), phi, ws)
    return vals if np.ndim(t) else float(vals[0])


def position_moments(field: WaveField, t) -> tuple[np.ndarray, np.ndarray]:
    """(mean, variance) of position at the given times.

    Both moments are normalized by the captured norm, so a slightly
    truncated projection still reports honest packet geometry.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    spectrum = field.spectrum
    L = spectrum.geometry.total_length
    z = _phased_coefficients(field, times)
    x1 = _quadratic_form(z, _overlap_matrix(spectrum, 0.0, L, 1)) / field.captured_norm
    x2 = _quadratic_form(z, _overlap_matrix(spectrum, 0.0, L, 2)) / field.captured_norm
    var = x2 - x1 * x1
    if np.ndim(t):
        return x1, var
    return float(x1[0]), float(var[0])


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Sampled observables over a time window."""

    times: np.ndarray
    rhs_probability: np.ndarray
    entropy: np.ndarray
    mean_position: np.ndarray
    variance: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


def time_series(
    field: WaveField,
    times,
    entropy_resolution: int = 512,
    chunk: int = 256,
    rhs_region=None,
) -> TimeSeries:
    """All standard observables over a set of sample times.

    Evaluation is chunked so the (time x position) density buffer used for
    the entropy stays small regardless of the window length.
    """
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    if ts.size == 0:
        raise ValueError("need at least one sample time")
    spectrum = field.spectrum
    L = spectrum.geometry.total_length
    lo, hi = _auto_rhs_region(spectrum) if rhs_region is None else rhs_region
    m_rhs = region_overlap(spectrum, lo, hi)
    m_x1 = _overlap_matrix(spectrum, 0.0, L, 1)
    m_x2 = _overlap_matrix(spectrum, 0.0, L, 2)
    _, ws, phi = _entropy_grid(
        spectrum, max(int(entropy_resolution), _ENTROPY_MIN_PANELS)
    )

    rhs = np.empty_like(ts)
    ent = np.empty_like(ts)
    mean = np.empty_like(ts)
    var = np.empty_like(ts)
    top = field.captured_norm
    for start in range(0, ts.size, chunk):
        sl = slice(start, min(start + chunk, ts.size))
        z = _phased_coefficients(field, ts[sl])
        rhs[sl] = np.clip(_quadratic_form(z, m_rhs), 0.0, top)
        ent[sl] = _entropy_from_modes(z, phi, ws)
        mean[sl] = _quadratic_form(z, m_x1) / top
        var[sl] = _quadratic_form(z, m_x2) / top - mean[sl] ** 2
    return TimeSeries(
        times=ts, rhs_probability=rhs, entropy=ent, mean_position=mean, variance=var
    )
