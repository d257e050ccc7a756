"""Gauss-Legendre quadrature helpers used by the spectral modules."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_TWO_PI = 2.0 * math.pi


@lru_cache(maxsize=256)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def interval_nodes(lo: float, hi: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped onto [lo, hi]."""
    if hi < lo:
        raise ValueError(f"inverted interval [{lo}, {hi}]")
    x, w = _leggauss(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return mid + half * x, half * w


def oscillation_order(wavenumber: float, length: float, minimum: int = 64) -> int:
    """Node count for an integrand oscillating at ``wavenumber`` over ``length``.

    64 nodes per full wavelength, never fewer than ``minimum``.
    """
    if length <= 0.0:
        return minimum
    cycles = abs(wavenumber) * length / _TWO_PI
    return max(minimum, int(math.ceil(64.0 * cycles)))


def oscillation_nodes(
    lo: float, hi: float, wavenumber: float, minimum: int = 64, maximum: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Composite nodes sized by :func:`oscillation_order`.

    Order-16 panels keep the node density while every call shares one tiny
    cached Gauss rule; a fresh rule per distinct order would pay a dense
    eigensolve each time.
    """
    count = oscillation_order(wavenumber, hi - lo, minimum)
    if maximum is not None:
        count = min(count, maximum)
    return panel_nodes(lo, hi, max(1, (count + 15) // 16), 16)


def panel_nodes(
    lo: float, hi: float, panels: int, order: int = 8
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule: ``panels`` uniform panels of ``order`` nodes."""
    if hi < lo:
        raise ValueError(f"inverted interval [{lo}, {hi}]")
    if panels < 1:
        raise ValueError("panels must be >= 1")
    x, w = _leggauss(order)
    width = (hi - lo) / panels
    mids = lo + width * (np.arange(panels) + 0.5)
    nodes = (mids[:, None] + 0.5 * width * x[None, :]).ravel()
    weights = np.broadcast_to(0.5 * width * w, (panels, order)).ravel().copy()
    return nodes, weights
