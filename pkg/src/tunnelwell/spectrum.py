"""Bound states of a hard-walled box containing one rectangular barrier.

Eigenvalues solve a transcendental matching condition.  Everything here is
written in terms of w = q^2 = 2m(V0 - E)/hbar^2, which is positive below the
barrier top (evanescent barrier interior) and negative above it (oscillatory
interior).  The helper functions `_cosw`/`_sinw` continue cosh(q u) and
sinh(q u)/q analytically through w = 0, so a single residual covers both
regimes, the barrier top, and the free-box limit V0 = 0.

Residuals are normalized by a positive envelope of their term magnitudes so
they stay O(1) at any barrier height (no cosh overflow) and vary continuously
across E = V0.  Zeros are unchanged by the normalization.

For a mirror-symmetric geometry the spectrum factorizes into even and odd
families about the box center.  The solver scans those two families
separately: their roots are simple and well separated even when the physical
pair splitting is far below double precision, which is the normal situation
for tall barriers.  Asymmetric geometries use a general transfer-matrix
residual; pairs closer than the scan resolution raise a tangency error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Literal

import numpy as np

from .errors import SpectrumError
from .geometry import PhysicalConstants, WellGeometry
from .quadrature import interval_nodes, oscillation_nodes

__all__ = [
    "Eigenstate",
    "Spectrum",
    "characteristic_value",
    "solve_spectrum",
    "eigenfunction_eval",
    "normalize_state",
]

_SERIES_CUTOFF = 1e-8
_EVANESCENT_SCALE_CUTOFF = 30.0
_GROWING_NOISE_RATIO = 1e-10


def _cosw(w, u):
    """cosh(sqrt(w) u) continued through w <= 0 as cos(sqrt(-w) u)."""
    w0 = np.asarray(w, dtype=float)
    scalar = w0.ndim == 0 and np.ndim(u) == 0
    w, u = np.broadcast_arrays(np.atleast_1d(w0), np.asarray(u, dtype=float))
    z = w * u * u
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, z, 0.0)
    out = 1.0 + zs / 2.0 * (1.0 + zs / 12.0)
    pos = (~small) & (w > 0.0)
    if np.any(pos):
        out[pos] = np.cosh(np.sqrt(w[pos]) * u[pos])
    neg = (~small) & (w <= 0.0)
    if np.any(neg):
        out[neg] = np.cos(np.sqrt(-w[neg]) * u[neg])
    return out[0] if scalar else out


def _sinw(w, u):
    """sinh(sqrt(w) u)/sqrt(w) continued through w <= 0 as sin(sqrt(-w) u)/sqrt(-w)."""
    w0 = np.asarray(w, dtype=float)
    scalar = w0.ndim == 0 and np.ndim(u) == 0
    w, u = np.broadcast_arrays(np.atleast_1d(w0), np.asarray(u, dtype=float))
    z = w * u * u
    small = np.abs(z) < _SERIES_CUTOFF
    zs = np.where(small, z, 0.0)
    out = u * (1.0 + zs / 6.0 * (1.0 + zs / 20.0))
    pos = (~small) & (w > 0.0)
    if np.any(pos):
        q = np.sqrt(w[pos])
        out[pos] = np.sinh(q * u[pos]) / q
    neg = (~small) & (w <= 0.0)
    if np.any(neg):
        kap = np.sqrt(-w[neg])
        out[neg] = np.sin(kap * u[neg]) / kap
    return out[0] if scalar else out


def _tanw(w, u):
    """tanh(sqrt(w) u)/sqrt(w) for w > 0 (the S/C ratio, overflow-free)."""
    q = np.sqrt(w)
    return np.tanh(q * u) / q


def _w_of_k(geometry: WellGeometry, constants: PhysicalConstants, k):
    return constants.inv_length2_per_energy * geometry.barrier_height - np.square(k)


# ---------------------------------------------------------------------------
# Characteristic residuals.  All accept numpy arrays of k and return arrays.
# ---------------------------------------------------------------------------


def _closed_full_residual(k, geometry: WellGeometry, constants: PhysicalConstants):
    """Envelope-normalized matching condition for the symmetric geometry.

    Zeros coincide with those of

        cosh(qb) sin(2ka) + ((k^2-q^2)/2qk) sinh(qb) cos(2ka)
                          + ((k^2+q^2)/2qk) sinh(qb)

    after multiplying through by 2k and dividing by a positive envelope.
    """
    k = np.asarray(k, dtype=float)
    a = geometry.left_width
    b = geometry.barrier_width
    w = _w_of_k(geometry, constants, k)
    s2, c2 = np.sin(2.0 * a * k), np.cos(2.0 * a * k)
    k2 = np.square(k)

    num = np.empty_like(k, dtype=float)
    den = np.empty_like(k, dtype=float)
    pos = w > 0.0
    if np.any(pos):
        tau = _tanw(w[pos], b)
        num[pos] = (
            2.0 * k[pos] * s2[pos]
            + (k2[pos] - w[pos]) * tau * c2[pos]
            + (k2[pos] + w[pos]) * tau
        )
        den[pos] = 2.0 * k[pos] + (np.abs(k2[pos] - w[pos]) + k2[pos] + w[pos]) * tau
    neg = ~pos
    if np.any(neg):
        C = _cosw(w[neg], b)
        S = _sinw(w[neg], b)
        num[neg] = (
            2.0 * k[neg] * C * s2[neg]
            + ((k2[neg] - w[neg]) * c2[neg] + k2[neg] + w[neg]) * S
        )
        den[neg] = 2.0 * k[neg] + (np.abs(k2[neg] - w[neg]) + k2[neg] + w[neg]) * b
    # k = 0 gives num = den = 0; report 0 residual rather than NaN.
    safe = den > 0.0
    return np.where(safe, num / np.where(safe, den, 1.0), 0.0)


def _closed_parity_residuals(k, geometry: WellGeometry, constants: PhysicalConstants):
    """Even/odd factor residuals of the symmetric matching condition.

    even: w sin(ka) S(w, b/2) + k cos(ka) C(w, b/2)
    odd:  sin(ka) C(w, b/2) + k cos(ka) S(w, b/2)
    both normalized by positive envelopes.
    """
    k = np.asarray(k, dtype=float)
    a = geometry.left_width
    h = 0.5 * geometry.barrier_width
    w = _w_of_k(geometry, constants, k)
    sa, ca = np.sin(a * k), np.cos(a * k)

    even = np.empty_like(k, dtype=float)
    odd = np.empty_like(k, dtype=float)
    pos = w > 0.0
    if np.any(pos):
        tau = _tanw(w[pos], h)
        even[pos] = (w[pos] * sa[pos] * tau + k[pos] * ca[pos]) / (
            w[pos] * tau + k[pos] + 1.0 * (k[pos] == 0.0)
        )
        odd[pos] = (sa[pos] + k[pos] * ca[pos] * tau) / (1.0 + k[pos] * tau)
    neg = ~pos
    if np.any(neg):
        C = _cosw(w[neg], h)
        S = _sinw(w[neg], h)
        den_e = np.abs(w[neg]) * h + k[neg]
        den_e = np.where(den_e > 0.0, den_e, 1.0)
        even[neg] = (w[neg] * sa[neg] * S + k[neg] * ca[neg] * C) / den_e
        odd[neg] = (sa[neg] * C + k[neg] * ca[neg] * S) / (1.0 + k[neg] * h)
    return even, odd


def _barrier_step(psi, dpsi, w, u):
    """Advance (psi, psi') across a barrier stretch of length u.

    For w > 0 the transfer matrix is scaled by cosh(q u), which only rescales
    the state vector and cannot move a zero of the final mismatch.
    """
    out_p = np.empty_like(psi)
    out_d = np.empty_like(psi)
    pos = w > 0.0
    if np.any(pos):
        tau = _tanw(w[pos], u)
        out_p[pos] = psi[pos] + tau * dpsi[pos]
        out_d[pos] = w[pos] * tau * psi[pos] + dpsi[pos]
    neg = ~pos
    if np.any(neg):
        C = _cosw(w[neg], u)
        S = _sinw(w[neg], u)
        out_p[neg] = C * psi[neg] + S * dpsi[neg]
        out_d[neg] = w[neg] * S * psi[neg] + C * dpsi[neg]
    return out_p, out_d


def _free_step(psi, dpsi, k, u):
    ku = k * u
    c, s = np.cos(ku), np.sin(ku)
    sk = np.where(k > 0.0, s / np.where(k > 0.0, k, 1.0), u)
    return c * psi + sk * dpsi, -k * s * psi + c * dpsi


def _renorm(psi, dpsi, scale):
    n = np.abs(psi) + np.abs(dpsi) / scale
    n = np.where(n > 0.0, n, 1.0)
    return psi / n, dpsi / n


def _transfer_state_to(
    k, geometry: WellGeometry, constants: PhysicalConstants, barrier_span: float
):
    """Propagate (0, 1) from x = 0 to barrier_left + barrier_span."""
    k = np.asarray(k, dtype=float)
    w = _w_of_k(geometry, constants, k)
    scale = np.maximum(np.maximum(k, np.sqrt(np.abs(w))), 1.0 / geometry.total_length)
    psi = np.zeros_like(k)
    dpsi = np.ones_like(k)
    psi, dpsi = _free_step(psi, dpsi, k, geometry.barrier_left)
    psi, dpsi = _renorm(psi, dpsi, scale)
    if barrier_span > 0.0:
        psi, dpsi = _barrier_step(psi, dpsi, w, barrier_span)
        psi, dpsi = _renorm(psi, dpsi, scale)
    return psi, dpsi, scale


def _transfer_full_residual(k, geometry: WellGeometry, constants: PhysicalConstants):
    """psi(L) mismatch for the general geometry, normalized region by region."""
    psi, dpsi, scale = _transfer_state_to(
        k, geometry, constants, geometry.barrier_width
    )
    psi, dpsi = _free_step(psi, dpsi, np.asarray(k, dtype=float), geometry.right_width)
    psi, _ = _renorm(psi, dpsi, scale)
    return psi


def _transfer_parity_residuals(k, geometry: WellGeometry, constants: PhysicalConstants):
    """Midpoint conditions for the symmetric geometry via matrix products.

    Even states have psi'(midpoint) = 0, odd states psi(midpoint) = 0.
    """
    psi, dpsi, scale = _transfer_state_to(
        k, geometry, constants, 0.5 * geometry.barrier_width
    )
    return dpsi / scale, psi


def characteristic_value(
    geometry: WellGeometry,
    constants: PhysicalConstants,
    energy: float,
    form: Literal["auto", "closed", "transfer"] = "auto",
) -> float:
    """Residual whose zeros in energy are the eigenvalues.

    ``closed`` is the symmetric-geometry matching condition (requires a
    centered barrier); ``transfer`` composes region transfer matrices and
    works for any barrier position.  ``auto`` picks closed when symmetric.
    The residual is envelope-normalized: smooth through E = barrier_height,
    O(1) at any height, zeros identical to the textbook form.
    """
    if math.isnan(energy):
        raise ValueError("energy is NaN")
    if energy < 0.0:
        raise ValueError(f"energy must be non-negative, got {energy}")
    if form == "auto":
        form = "closed" if geometry.is_symmetric else "transfer"
    k = constants.wavenumber(energy)
    if form == "closed":
        if not geometry.is_symmetric:
            raise ValueError(
                "closed form applies only to a centered barrier; use form='transfer'"
            )
        return float(_closed_full_residual(np.atleast_1d(k), geometry, constants)[0])
    if form == "transfer":
        return float(_transfer_full_residual(np.atleast_1d(k), geometry, constants)[0])
    raise ValueError(f"unknown characteristic form {form!r}")


# ---------------------------------------------------------------------------
# Spectrum types and the solver.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Eigenstate:
    """One normalized bound state.

    ``wavenumber`` is k = sqrt(2mE)/hbar; ``decay`` is sqrt(|2m(V0-E)|)/hbar,
    the barrier-interior decay constant when ``regime`` is "evanescent" or the
    interior oscillation wavenumber when "oscillatory" (E above the barrier,
    including the free box).  ``parity`` is +1/-1 about the box center for
    symmetric geometry, 0 otherwise.  ``norm_const`` scales the raw piecewise
    shape to unit L2 norm; states come out of the solver already normalized.
    """

    index: int
    energy: float
    wavenumber: float
    decay: float
    regime: str
    norm_const: float = 1.0
    parity: int = 0

    @property
    def w_signed(self) -> float:
        s = self.decay * self.decay
        return s if self.regime == "evanescent" else -s


@dataclass(frozen=True)
class Spectrum:
    """The lowest eigenstates of one geometry, sorted by energy.

    Energies are non-decreasing; strictly increasing whenever pair splittings
    are representable in double precision (tall-barrier symmetric pairs can
    collapse to equal doubles, ordered even before odd).
    """

    geometry: WellGeometry
    constants: PhysicalConstants
    states: tuple[Eigenstate, ...]
    bracket_resolution: float
    root_tolerance: float
    form: str

    def __len__(self) -> int:
        return len(self.states)

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.states])

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.array([s.wavenumber for s in self.states])


def _bisect_root(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """Refine a sign-change bracket down to floating-point resolution."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo, 0.0
    if fhi == 0.0:
        return hi, 0.0
    if (flo > 0.0) == (fhi > 0.0):
        raise SpectrumError(f"lost bracket [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid, 0.0
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi), hi - lo


def _scan_brackets(values: np.ndarray, ks: np.ndarray) -> list[tuple[float, float]]:
    """Sign-change brackets on a sampled residual; an exact grid zero is its own root."""
    out = [(float(ks[i]), float(ks[i])) for i in np.flatnonzero(values == 0.0)]
    sign = np.sign(values)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0.0):
        out.append((float(ks[i]), float(ks[i + 1])))
    out.sort()
    return out


class _Family:
    """One root family: a vectorized residual plus its parity label."""

    def __init__(self, fvec: Callable[[np.ndarray], np.ndarray], parity: int):
        self.fvec = fvec
        self.parity = parity

    def fscalar(self, k: float) -> float:
        return float(self.fvec(np.array([k]))[0])


_DIP_TRIGGER = 0.9


def _find_dips(values: np.ndarray) -> list[tuple[int, int, int]]:
    """(lo, hi, bottom) index windows around small sign-preserving |residual| dips.

    A near-degenerate pair of roots shows up as such a dip instead of a pair
    of sign changes; each candidate gets a local zoom via :func:`_probe_dip`.
    Windows extend only across cells without sign changes, so probe hits can
    never duplicate roots already found by the plain bracket scan.
    """
    n = len(values)
    if n < 4:
        return []
    absv = np.abs(values)
    sign = np.sign(values)
    cand = (
        (sign[:-2] == sign[1:-1])
        & (sign[1:-1] == sign[2:])
        & (absv[1:-1] < absv[:-2])
        & (absv[1:-1] <= absv[2:])
        & (absv[1:-1] < _DIP_TRIGGER)
    )
    idx = (np.flatnonzero(cand) + 1).tolist()
    if len(idx) > 200:
        idx = sorted(idx, key=lambda i: absv[i])[:200]
    windows = []
    for i in idx:
        hi = i + 2 if i + 2 < n and sign[i + 2] == sign[i + 1] else i + 1
        windows.append((i - 1, hi, i))
    return windows


def _probe_dip(
    fvec: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    best: float,
    tangency_hint: str,
) -> list[tuple[float, float]]:
    """Zoom into a dip until it either reveals sign changes or is classified.

    Returns brackets if the dip hides a resolvable pair of roots, [] if it is
    a benign positive minimum, and raises if the residual bottoms out at the
    noise floor without crossing (a pair split below double precision).
    """
    for _ in range(12):
        ks = np.linspace(lo, hi, 257)
        vals = fvec(ks)
        brackets = _scan_brackets(vals, ks)
        if brackets:
            return brackets
        i = int(np.argmin(np.abs(vals)))
        depth = float(abs(vals[i]))
        span_exhausted = (hi - lo) < 8.0 * np.spacing(hi)
        if depth < 1e-12 or (span_exhausted and depth < 1e-9):
            raise SpectrumError(
                "characteristic residual touches zero without changing sign: "
                "two levels are degenerate beyond double precision "
                f"({tangency_hint})"
            )
        if depth > 0.9 * best or span_exhausted:
            return []
        best = depth
        lo, hi = ks[max(i - 1, 0)], ks[min(i + 1, len(ks) - 1)]
    return []


def _collect_roots(
    families: list[_Family],
    n_levels: int,
    dk: float,
    k_hint: float,
    tangency_hint: str,
) -> list[tuple[float, int, float]]:
    """Scan families on a shared grid until n_levels roots are in hand.

    Returns (k_root, parity, k_bracket_width) triples sorted by k with
    even-before-odd tie-breaking at equal doubles.
    """
    parity_rank = {1: 0, -1: 1, 0: 0}
    k_hi = max(k_hint, 11.0 * dk)
    for attempt in range(7):
        n_pts = int(math.ceil(k_hi / dk))
        if n_pts > 40_000_000:
            raise SpectrumError(
                "bracket scan grid too large; loosen bracket_resolution "
                "or request fewer levels"
            )
        ks = dk * np.arange(1, n_pts + 1)
        roots: list[tuple[float, int, float]] = []
        for fam in families:
            vals = fam.fvec(ks)
            brackets = _scan_brackets(vals, ks)
            for i_lo, i_hi, i_min in _find_dips(vals):
                brackets += _probe_dip(
                    fam.fvec,
                    float(ks[i_lo]),
                    float(ks[i_hi]),
                    float(abs(vals[i_min])),
                    tangency_hint,
                )
            for blo, bhi in brackets:
                k_root, width = _bisect_root(fam.fscalar, blo, bhi)
                roots.append((k_root, fam.parity, width))
        roots.sort(key=lambda r: (r[0], parity_rank[r[1]]))
        if len(roots) >= n_levels:
            return roots[:n_levels]
        k_hi *= 1.6
    raise SpectrumError(
        f"found only {len(roots)} of {n_levels} levels after extending the "
        f"scan to k = {k_hi:.6g}. If levels are nearly degenerate this is a "
        f"tangency of the residual; retry with a finer bracket_resolution "
        f"({tangency_hint}).",
        found=len(roots),
    )


def solve_spectrum(
    geometry: WellGeometry,
    constants: PhysicalConstants,
    n_levels: int,
    form: Literal["auto", "closed", "transfer"] = "auto",
    bracket_resolution: float | None = None,
    normalize: bool = True,
) -> Spectrum:
    """Find the lowest ``n_levels`` eigenstates.

    The residual is sampled on a uniform wavenumber grid of step
    ``bracket_resolution`` (default pi/(20 L)) and each sign change is
    refined by bisection to floating-point resolution, far tighter than the
    contract tolerance |dE| <= 1e-12 max(1, E).  A shortfall raises
    :class:`SpectrumError` instead of returning fewer levels.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if form not in ("auto", "closed", "transfer"):
        raise ValueError(f"unknown characteristic form {form!r}")
    symmetric = geometry.is_symmetric
    if form == "closed" and not symmetric:
        raise ValueError(
            "closed form applies only to a centered barrier; use form='transfer'"
        )
    resolved_form = form
    if form == "auto":
        resolved_form = "closed" if symmetric else "transfer"

    L = geometry.total_length
    dk = bracket_resolution if bracket_resolution is not None else math.pi / (20.0 * L)
    if not (dk > 0.0):
        raise ValueError("bracket_resolution must be positive")

    if symmetric:
        if resolved_form == "closed":

            def f_even(ks):
                return _closed_parity_residuals(ks, geometry, constants)[0]

            def f_odd(ks):
                return _closed_parity_residuals(ks, geometry, constants)[1]

        else:

            def f_even(ks):
                return _transfer_parity_residuals(ks, geometry, constants)[0]

            def f_odd(ks):
                return _transfer_parity_residuals(ks, geometry, constants)[1]

        families = [_Family(f_even, 1), _Family(f_odd, -1)]
        hint = "each parity family has roots roughly pi/chamber_width apart"
    else:

        def f_full(ks):
            return _transfer_full_residual(ks, geometry, constants)

        families = [_Family(f_full, 0)]
        hint = (
            "asymmetric near-degenerate pairs need the grid to land between "
            "the two roots"
        )

    # generous wavenumber reach: chambers dominate the level count
    k_hint = math.pi * (n_levels + 4) / max(L - geometry.barrier_width, 0.1 * L)
    roots = _collect_roots(families, n_levels, dk, k_hint, hint)

    w_top = constants.inv_length2_per_energy * geometry.barrier_height
    states = []
    worst = 0.0
    for i, (k_root, parity, width) in enumerate(roots):
        energy = constants.energy(k_root)
        e_width = abs(constants.energy(k_root + width) - energy) if width else 0.0
        worst = max(worst, e_width)
        w = w_top - k_root * k_root
        regime = "evanescent" if w > 0.0 else "oscillatory"
        states.append(
            Eigenstate(
                index=i + 1,
                energy=energy,
                wavenumber=k_root,
                decay=math.sqrt(abs(w)),
                regime=regime,
                parity=parity,
            )
        )

    spec = Spectrum(
        geometry=geometry,
        constants=constants,
        states=tuple(states),
        bracket_resolution=dk,
        root_tolerance=worst,
        form=resolved_form,
    )
    if normalize:
        spec = replace(
            spec, states=tuple(normalize_state(s, geometry) for s in spec.states)
        )
    return spec


# ---------------------------------------------------------------------------
# Eigenfunction evaluation.
# ---------------------------------------------------------------------------


def _exp_coeffs(q: float, v: float, d: float) -> tuple[float, float]:
    """Split edge data (value, slope) into decaying/growing coefficients.

    Returns (P, G) with shape(u) = P e^{-qu} + G e^{qu}.  A growing
    coefficient below the decaying one's round-off is the cancellation noise
    of v + d/q, not physics, and is dropped.
    """
    P = 0.5 * (v - d / q)
    G = 0.5 * (v + d / q)
    if abs(G) <= abs(P) * _GROWING_NOISE_RATIO:
        G = 0.0
    return P, G


def _eval_exp_shape(P: float, G: float, q: float, u: np.ndarray) -> np.ndarray:
    vals = P * np.exp(-q * u)
    if G != 0.0:
        vals = vals + math.copysign(1.0, G) * np.exp(q * u + math.log(abs(G)))
    return vals


def _splice_scales(
    state: Eigenstate, geometry: WellGeometry, vl: float, dl: float, vr: float, dr: float
) -> tuple[float, float]:
    """Amplitudes (sl, sr) of the left-wall and right-wall partial shapes.

    The eigenfunction is sl * [sin(kx) continued into the barrier] left of
    the barrier midpoint and sr * [sin(k(L-x)) continued] right of it.  For a
    centered barrier the ratio is exactly the parity.  Otherwise, below the
    barrier top, the two continuations are matched coefficient-by-coefficient
    in the e^{+-qu} basis, which stays perfectly conditioned however opaque
    the barrier is (a value/slope least-squares match degenerates there: both
    tails look like pure decay).  Chambers whose coupling falls below double
    precision come out exactly decoupled, with the far side at zero.
    """
    if state.parity != 0:
        return 1.0, float(state.parity)
    k, w = state.wavenumber, state.w_signed
    b = geometry.barrier_width
    if w > 0.0:
        q = state.decay
        if q * b > 345.0:
            # no representable coupling: keep the chamber at resonance
            res_l = abs(vl * q + dl) / (abs(vl) * q + abs(dl))
            res_r = abs(vr * q + dr) / (abs(vr) * q + abs(dr))
            return (1.0, 0.0) if res_l <= res_r else (0.0, 1.0)
        PL, GL = _exp_coeffs(q, vl, dl)
        PR, GR = _exp_coeffs(q, vr, dr)
        if GL == 0.0:
            return 1.0, 0.0
        if PR == 0.0:
            return 0.0, 1.0
        log_d = q * b + math.log(abs(GL)) - math.log(abs(PR))
        sign_d = math.copysign(1.0, GL) * math.copysign(1.0, PR)
        if log_d <= 0.0:
            return 1.0, sign_d * math.exp(log_d)
        return sign_d * math.exp(-log_d), 1.0
    # oscillatory interior: value/slope least squares at the midpoint is fine
    h = 0.5 * b
    C = float(_cosw(w, h))
    S = float(_sinw(w, h))
    lv, ld = vl * C + dl * S, w * vl * S + dl * C
    rv = vr * C + dr * S
    rd = -(w * vr * S + dr * C)  # d/dx flips the rightward parameterization
    s2 = k * k + abs(w) + 1.0 / geometry.total_length**2
    denom = rv * rv + rd * rd / s2
    if not (denom > 0.0) or not math.isfinite(denom):
        raise SpectrumError(
            "cannot splice eigenfunction halves: degenerate midpoint data"
        )
    return 1.0, (lv * rv + ld * rd / s2) / denom


def eigenfunction_eval(state: Eigenstate, geometry: WellGeometry, x) -> np.ndarray:
    """Evaluate the normalized eigenfunction on ``x`` (scalar or array).

    The shape is built from both walls and spliced at the barrier midpoint:
    sin(k x) from the left wall, sin(k (L - x)) from the right wall, each
    continued into the barrier interior in the stable exponential split with
    sub-round-off growing branches dropped.  Values are exactly zero at both
    walls; positions outside [0, L] raise ValueError.
    """
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    L = geometry.total_length
    if np.any(xs < 0.0) or np.any(xs > L):
        raise ValueError("position outside the box [0, L]")

    k = state.wavenumber
    w = state.w_signed
    c = geometry.barrier_left
    b = geometry.barrier_width
    r = geometry.barrier_right
    d = geometry.right_width
    mid = c + 0.5 * b

    vl, dl = math.sin(k * c), k * math.cos(k * c)
    vr, dr = math.sin(k * d), k * math.cos(k * d)
    sl, sr = _splice_scales(state, geometry, vl, dl, vr, dr)

    out = np.empty_like(xs)
    left = xs <= min(c, mid)
    out[left] = sl * np.sin(k * xs[left])
    right = xs >= max(r, mid)
    out[right] = sr * np.sin(k * (L - xs[right]))

    lbar = (xs > c) & (xs <= mid)
    rbar = (xs > mid) & (xs < r)
    if w > 0.0:
        q = state.decay
        PL, GL = _exp_coeffs(q, vl, dl)
        PR, GR = _exp_coeffs(q, vr, dr)
        out[lbar] = sl * _eval_exp_shape(PL, GL, q, xs[lbar] - c)
        out[rbar] = sr * _eval_exp_shape(PR, GR, q, r - xs[rbar])
    else:
        u = xs[lbar] - c
        out[lbar] = sl * (vl * _cosw(w, u) + dl * _sinw(w, u))
        s = r - xs[rbar]
        out[rbar] = sr * (vr * _cosw(w, s) + dr * _sinw(w, s))

    out *= state.norm_const
    return out[0] if scalar else out


def _barrier_quniform(state: Eigenstate, geometry: WellGeometry):
    """Quadrature nodes for the barrier interior of one state."""
    c, r = geometry.barrier_left, geometry.barrier_right
    b = geometry.barrier_width
    if b == 0.0:
        return np.empty(0), np.empty(0)
    w = state.w_signed
    if w <= 0.0:
        return oscillation_nodes(c, r, math.sqrt(abs(w)))
    q = math.sqrt(w)
    if q * b <= 2.0 * _EVANESCENT_SCALE_CUTOFF:
        return oscillation_nodes(c, r, q, maximum=4096)
    # deep barrier: resolve the two boundary layers, skip the dead middle
    delta = _EVANESCENT_SCALE_CUTOFF / q
    xl, wl = interval_nodes(c, c + delta, 128)
    xr, wr = interval_nodes(r - delta, r, 128)
    return np.concatenate([xl, xr]), np.concatenate([wl, wr])


def state_norm_squared(state: Eigenstate, geometry: WellGeometry) -> float:
    """L2 norm squared of the state's current shape, by region-wise quadrature."""
    k = state.wavenumber
    total = 0.0
    for lo, hi in (
        (0.0, geometry.barrier_left),
        (geometry.barrier_right, geometry.total_length),
    ):
        if hi > lo:
            xs, ws = oscillation_nodes(lo, hi, 2.0 * k)
            vals = eigenfunction_eval(state, geometry, xs)
            total += float(ws @ np.square(vals))
    xs, ws = _barrier_quniform(state, geometry)
    if xs.size:
        vals = eigenfunction_eval(state, geometry, xs)
        total += float(ws @ np.square(vals))
    return total


def normalize_state(state: Eigenstate, geometry: WellGeometry) -> Eigenstate:
    """Return the state with ``norm_const`` set so the L2 norm is 1."""
    base = replace(state, norm_const=1.0)
    nsq = state_norm_squared(base, geometry)
    if not (nsq > 0.0) or not math.isfinite(nsq):
        raise SpectrumError(f"state {state.index} has invalid norm {nsq}")
    return replace(state, norm_const=1.0 / math.sqrt(nsq))
