"""Experiment configuration: INI parsing, validation, defaults.

The file format is flat ``key = value`` pairs grouped into a fixed set of
sections.  Every key has a default, so an empty file is a valid experiment
(the symmetric reference setup).  Unknown sections or keys are rejected
with a spelling suggestion rather than silently ignored.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .geometry import (
    PhysicalConstants,
    WellGeometry,
    constants_preset,
    natural_constants,
)
from .packet import PacketSpec

SWEEP_AXES = ("barrier_height", "barrier_width", "barrier_position")
OUTPUT_NAMES = (
    "rhs_prob",
    "entropy",
    "variance",
    "divergence",
    "degeneracy",
    "splitting",
)

_SECTION_KEYS = {
    "constants": ("preset",),
    "geometry": ("total_length", "barrier_left", "barrier_width", "barrier_height"),
    "packet": ("center", "width", "momentum"),
    "evolution": (
        "levels",
        "t_start",
        "t_end",
        "samples",
        "rhs_region",
        "entropy_resolution",
        "frames",
        "x_samples",
    ),
    "sweep": ("axis", "values"),
    "outputs": ("series",),
    "divergence": ("threshold", "metric", "mode"),
    "scan": ("degeneracy_ratio",),
}


@dataclass(frozen=True)
class TimeWindow:
    """Uniform sample times from start to end inclusive."""

    start: float = 0.0
    end: float = 50.0
    samples: int = 2001

    def times(self) -> np.ndarray:
        return np.linspace(self.start, self.end, self.samples)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class DivergenceSettings:
    threshold: float = 125.58
    metric: str = "variance"
    mode: str = "two-term"


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one run (or one sweep of runs)."""

    preset: str = "natural"
    constants: PhysicalConstants = field(default_factory=natural_constants)
    geometry: WellGeometry = WellGeometry(73.0, 35.0, 3.0, 360.0)
    packet: PacketSpec = PacketSpec(11.0, 3.0, 0.0)
    n_levels: int = 30
    window: TimeWindow = TimeWindow()
    rhs_region: tuple[float, float] | None = None
    outputs: tuple[str, ...] = ("rhs_prob", "entropy", "variance")
    sweep: SweepSpec | None = None
    divergence: DivergenceSettings = DivergenceSettings()
    degeneracy_ratio: float = 0.05
    entropy_resolution: int = 512
    frames: int = 9
    x_samples: int = 1201

    def as_mapping(self) -> dict:
        """Plain nested dict of the resolved values, for the run manifest."""
        return {
            "constants": {
                "preset": self.preset,
                "hbar": self.constants.hbar,
                "mass": self.constants.mass,
            },
            "geometry": {
                "total_length": self.geometry.total_length,
                "barrier_left": self.geometry.barrier_left,
                "barrier_width": self.geometry.barrier_width,
                "barrier_height": self.geometry.barrier_height,
            },
            "packet": {
                "center": self.packet.center,
                "width": self.packet.width,
                "momentum": self.packet.momentum,
            },
            "evolution": {
                "levels": self.n_levels,
                "t_start": self.window.start,
                "t_end": self.window.end,
                "samples": self.window.samples,
                "rhs_region": "auto" if self.rhs_region is None else list(self.rhs_region),
                "entropy_resolution": self.entropy_resolution,
                "frames": self.frames,
                "x_samples": self.x_samples,
            },
            "sweep": None
            if self.sweep is None
            else {"axis": self.sweep.axis, "values": list(self.sweep.values)},
            "outputs": list(self.outputs),
            "divergence": {
                "threshold": self.divergence.threshold,
                "metric": self.divergence.metric,
                "mode": self.divergence.mode,
            },
            "scan": {"degeneracy_ratio": self.degeneracy_ratio},
        }


def default_config() -> ExperimentConfig:
    """The reference setup: symmetric tall barrier, centered sleepy packet."""
    return ExperimentConfig(constants=constants_preset("natural"))


def _suggestion(word: str, options) -> str:
    close = difflib.get_close_matches(word, list(options), n=1)
    return f"; did you mean {close[0]!r}?" if close else ""


def _parse_number(section: str, key: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"{section}.{key}: expected {kind.__name__}, got {raw!r}"
        ) from None


def _parse_list(section: str, key: str, raw: str) -> tuple[float, ...]:
    tokens = raw.replace(",", " ").split()
    if not tokens:
        raise ConfigError(f"{section}.{key}: expected at least one number")
    return tuple(_parse_number(section, key, tok, float) for tok in tokens)


class _Table:
    """Typed view over the parsed file with default fallbacks."""

    def __init__(self, parser):
        self._parser = parser

    def get(self, section, key, default, kind=float):
        if not self._parser.has_option(section, key):
            return default
        raw = self._parser.get(section, key).strip()
        if kind is str:
            return raw
        return _parse_number(section, key, raw, kind)

    def raw(self, section, key):
        if not self._parser.has_option(section, key):
            return None
        return self._parser.get(section, key).strip()


def _check_names(parser) -> None:
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(
                f"unknown section [{section}]"
                + _suggestion(section, _SECTION_KEYS)
            )
        allowed = _SECTION_KEYS[section]
        for key in parser.options(section):
            if key not in allowed:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}]"
                    + _suggestion(key, allowed)
                )


def _resolve_geometry(table: _Table) -> WellGeometry:
    L = table.get("geometry", "total_length", 73.0)
    c = table.get("geometry", "barrier_left", 35.0)
    b = table.get("geometry", "barrier_width", 3.0)
    v0 = table.get("geometry", "barrier_height", 360.0)
    if not L > 0.0:
        raise ConfigError(f"geometry.total_length: must be positive, got {L}")
    if b < 0.0:
        raise ConfigError(f"geometry.barrier_width: must be non-negative, got {b}")
    if v0 < 0.0:
        raise ConfigError(f"geometry.barrier_height: must be non-negative, got {v0}")
    if c < 0.0:
        raise ConfigError(f"geometry.barrier_left: must be non-negative, got {c}")
    if c + b >= L:
        raise ConfigError(
            f"geometry.barrier_left: barrier [{c}, {c + b}] must end strictly "
            f"inside the box of length {L}"
        )
    try:
        return WellGeometry(L, c, b, v0)
    except ConfigError as exc:
        raise ConfigError(f"geometry: {exc}") from None


def _resolve_packet(table: _Table, geometry: WellGeometry) -> PacketSpec:
    center = table.get("packet", "center", 11.0)
    width = table.get("packet", "width", 3.0)
    momentum = table.get("packet", "momentum", 0.0)
    if not width > 0.0:
        raise ConfigError(f"packet.width: must be positive, got {width}")
    if not 0.0 < center < geometry.total_length:
        raise ConfigError(
            f"packet.center: must lie inside the box (0, {geometry.total_length}), "
            f"got {center}"
        )
    try:
        return PacketSpec(center, width, momentum)
    except ConfigError as exc:
        raise ConfigError(f"packet: {exc}") from None


def _resolve_window(table: _Table) -> TimeWindow:
    start = table.get("evolution", "t_start", 0.0)
    end = table.get("evolution", "t_end", 50.0)
    samples = table.get("evolution", "samples", 2001, int)
    if start < 0.0:
        raise ConfigError(f"evolution.t_start: must be non-negative, got {start}")
    if not end > start:
        raise ConfigError(
            f"evolution.t_end: must exceed t_start, got {end} <= {start}"
        )
    if samples < 2:
        raise ConfigError(f"evolution.samples: need at least 2, got {samples}")
    return TimeWindow(start, end, samples)


def _resolve_rhs_region(table: _Table, geometry: WellGeometry):
    raw = table.raw("evolution", "rhs_region")
    if raw is None or raw.lower() == "auto":
        return None
    pair = _parse_list("evolution", "rhs_region", raw)
    if len(pair) != 2:
        raise ConfigError(
            f"evolution.rhs_region: expected 'auto' or two numbers, got {raw!r}"
        )
    lo, hi = pair
    if not (0.0 <= lo < hi <= geometry.total_length):
        raise ConfigError(
            f"evolution.rhs_region: need 0 <= lo < hi <= {geometry.total_length}, "
            f"got [{lo}, {hi}]"
        )
    return (lo, hi)


def _resolve_sweep(table: _Table, parser, geometry: WellGeometry) -> SweepSpec | None:
    if not parser.has_section("sweep") or not parser.options("sweep"):
        return None
    axis = table.get("sweep", "axis", None, str)
    if axis is None:
        raise ConfigError("sweep.axis: required when a sweep is configured")
    if axis not in SWEEP_AXES:
        raise ConfigError(
            f"sweep.axis: unknown axis {axis!r}" + _suggestion(axis, SWEEP_AXES)
        )
    raw = table.raw("sweep", "values")
    if raw is None:
        raise ConfigError("sweep.values: required when a sweep is configured")
    values = _parse_list("sweep", "values", raw)
    for v in values:
        if axis in ("barrier_height", "barrier_width") and v < 0.0:
            raise ConfigError(f"sweep.values: {axis} must be non-negative, got {v}")
        if axis == "barrier_position" and not (
            0.0 <= v and v + geometry.barrier_width < geometry.total_length
        ):
            raise ConfigError(
                f"sweep.values: barrier at {v} does not fit inside the box"
            )
    return SweepSpec(axis, values)


def _resolve_outputs(table: _Table) -> tuple[str, ...]:
    raw = table.raw("outputs", "series")
    if raw is None:
        return ("rhs_prob", "entropy", "variance")
    names = raw.replace(",", " ").split()
    if not names:
        raise ConfigError("outputs.series: expected at least one name")
    for name in names:
        if name not in OUTPUT_NAMES:
            raise ConfigError(
                f"outputs.series: unknown output {name!r}"
                + _suggestion(name, OUTPUT_NAMES)
            )
    # canonical order, duplicates dropped
    return tuple(name for name in OUTPUT_NAMES if name in names)


def _resolve_divergence(table: _Table) -> DivergenceSettings:
    threshold = table.get("divergence", "threshold", 125.58)
    metric = table.get("divergence", "metric", "variance", str)
    mode = table.get("divergence", "mode", "two-term", str)
    if not threshold > 0.0:
        raise ConfigError(f"divergence.threshold: must be positive, got {threshold}")
    if metric not in ("variance", "rms"):
        raise ConfigError(
            f"divergence.metric: unknown metric {metric!r}"
            + _suggestion(metric, ("variance", "rms"))
        )
    if mode not in ("two-term", "full"):
        raise ConfigError(
            f"divergence.mode: unknown mode {mode!r}"
            + _suggestion(mode, ("two-term", "full"))
        )
    return DivergenceSettings(threshold, metric, mode)


def _build_config(parser) -> ExperimentConfig:
    _check_names(parser)
    table = _Table(parser)

    preset = table.get("constants", "preset", "natural", str)
    try:
        constants = constants_preset(preset)
    except ConfigError as exc:
        raise ConfigError(f"constants.preset: {exc}") from None

    geometry = _resolve_geometry(table)
    packet = _resolve_packet(table, geometry)
    window = _resolve_window(table)

    n_levels = table.get("evolution", "levels", 30, int)
    if n_levels < 1:
        raise ConfigError(f"evolution.levels: need at least 1, got {n_levels}")
    entropy_resolution = table.get("evolution", "entropy_resolution", 512, int)
    if entropy_resolution < 1:
        raise ConfigError(
            f"evolution.entropy_resolution: must be positive, got {entropy_resolution}"
        )
    frames = table.get("evolution", "frames", 9, int)
    if frames < 1:
        raise ConfigError(f"evolution.frames: must be positive, got {frames}")
    x_samples = table.get("evolution", "x_samples", 1201, int)
    if x_samples < 2:
        raise ConfigError(f"evolution.x_samples: need at least 2, got {x_samples}")

    degeneracy_ratio = table.get("scan", "degeneracy_ratio", 0.05)
    if not degeneracy_ratio > 0.0:
        raise ConfigError(
            f"scan.degeneracy_ratio: must be positive, got {degeneracy_ratio}"
        )

    return ExperimentConfig(
        preset=preset,
        constants=constants,
        geometry=geometry,
        packet=packet,
        n_levels=n_levels,
        window=window,
        rhs_region=_resolve_rhs_region(table, geometry),
        outputs=_resolve_outputs(table),
        sweep=_resolve_sweep(table, parser, geometry),
        divergence=_resolve_divergence(table),
        degeneracy_ratio=degeneracy_ratio,
        entropy_resolution=entropy_resolution,
        frames=frames,
        x_samples=x_samples,
    )


def load_config(path) -> ExperimentConfig:
    """Parse and validate an experiment file.

    Raises :class:`ConfigError` for a missing file, malformed INI syntax,
    unknown names, or any out-of-range value.  An empty file yields the
    default experiment.
    """
    import configparser

    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from None
    return _build_config(parser)
