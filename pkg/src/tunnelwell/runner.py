"""Experiment orchestration: sweeps, delimited output, run manifest.

A run maps the configured sweep (or the single base geometry) through the
solve/project/observe pipeline and writes one CSV per enabled output per
sweep point, plus ``manifest.json`` describing what was produced.  Floats
are written with ``repr``, the shortest decimal form that round-trips, so
a rerun of the same configuration with the same library version produces
byte-identical CSVs.  Wall-clock timings and the creation timestamp live
only under the manifest's ``volatile`` key.

A failure at one sweep point is recorded in the manifest and does not stop
the remaining points; a point that fails writes no files at all.
"""

from __future__ import annotations

import json
import time
import warnings
from pathlib import Path

import numpy as np

from ._version import __version__
from .analytics import (
    degeneracy_scan,
    entropy_vs_position,
    flag_near_degenerate,
    splitting_report,
)
from .classical import divergence_time, matched_packet
from .config import OUTPUT_NAMES, ExperimentConfig
from .errors import ConfigError, ProjectionError, TunnelwellError
from .geometry import WellGeometry
from .observables import time_series
from .packet import project_packet, wavefunction_at
from .spectrum import solve_spectrum

__all__ = [
    "describe_config",
    "run_experiment",
    "run_scan",
    "write_csv",
]

_POINT_ERRORS = (TunnelwellError, ValueError, ZeroDivisionError, FloatingPointError)
_FIELD_OUTPUTS = frozenset(
    {"rhs_prob", "entropy", "variance", "divergence", "density"}
)
_RUNNER_ONLY_OUTPUTS = ("spectrum", "density")

_SPECTRUM_HEADER = ["n", "E_n", "k_n", "q_or_kappa", "regime", "C_n"]
_SPLITTING_HEADER = [
    "pair_index",
    "e_lower",
    "e_upper",
    "gap",
    "estimated_gap",
    "instanton_action",
]


def _fmt(value) -> str:
    """Shortest round-trip text for one CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def write_csv(path, header, rows, trailer: str | None = None) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    if trailer is not None:
        lines.append(trailer)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _point_geometry(base: WellGeometry, axis: str, value: float) -> WellGeometry:
    if axis == "barrier_height":
        return WellGeometry(
            base.total_length, base.barrier_left, base.barrier_width, value
        )
    if axis == "barrier_width":
        # both chamber widths stay fixed; the box stretches around the barrier
        return WellGeometry(
            base.left_width + value + base.right_width,
            base.barrier_left,
            value,
            base.barrier_height,
        )
    if axis == "barrier_position":
        return WellGeometry(
            base.total_length, value, base.barrier_width, base.barrier_height
        )
    raise ConfigError(f"unknown sweep axis {axis!r}")


def _sweep_points(config: ExperimentConfig):
    if config.sweep is None:
        return [(0, None, config.geometry)]
    return [
        (i, v, _point_geometry(config.geometry, config.sweep.axis, v))
        for i, v in enumerate(config.sweep.values)
    ]


def _geometry_mapping(geometry: WellGeometry) -> dict:
    return {
        "total_length": geometry.total_length,
        "barrier_left": geometry.barrier_left,
        "barrier_width": geometry.barrier_width,
        "barrier_height": geometry.barrier_height,
    }


def _spectrum_rows(spectrum):
    return [
        (s.index, s.energy, s.wavenumber, s.decay, s.regime, s.norm_const)
        for s in spectrum.states
    ]


def _point_payload(config: ExperimentConfig, geometry: WellGeometry, outputs):
    """Compute every requested output for one geometry.

    Returns (payload, captured_norm, warning_texts, timings, data) where
    payload maps output name -> (header, rows, trailer) ready for
    :func:`write_csv` and data holds the arrays the figure renderer uses.
    Nothing is written here, so a failure leaves no partial files behind.
    """
    payload: dict[str, tuple] = {}
    data: dict = {}
    timings: dict[str, float] = {}
    captured = None
    warning_texts: list[str] = []

    tick = time.perf_counter()
    spectrum = solve_spectrum(geometry, config.constants, config.n_levels)
    timings["solve_s"] = time.perf_counter() - tick
    data["spectrum"] = spectrum

    if "spectrum" in outputs:
        payload["spectrum"] = (_SPECTRUM_HEADER, _spectrum_rows(spectrum), None)

    field = None
    if outputs & _FIELD_OUTPUTS:
        tick = time.perf_counter()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            field = project_packet(spectrum, config.packet)
        warning_texts = [str(w.message) for w in caught]
        captured = field.captured_norm
        timings["project_s"] = time.perf_counter() - tick

    times = config.window.times()
    series_wanted = outputs & {"rhs_prob", "entropy", "variance"}
    if series_wanted:
        tick = time.perf_counter()
        series = time_series(
            field,
            times,
            entropy_resolution=config.entropy_resolution,
            rhs_region=config.rhs_region,
        )
        timings["series_s"] = time.perf_counter() - tick
        data["series"] = series
        if "rhs_prob" in outputs:
            payload["rhs_prob"] = (
                ["t", "rhs_prob"],
                zip(times, series.rhs_probability),
                None,
            )
        if "entropy" in outputs:
            payload["entropy"] = (["t", "entropy"], zip(times, series.entropy), None)
        if "variance" in outputs:
            payload["variance"] = (
                ["t", "mean_x", "variance"],
                zip(times, series.mean_position, series.variance),
                None,
            )

    if "divergence" in outputs:
        tick = time.perf_counter()
        mirror = matched_packet(field)
        result = divergence_time(
            field,
            mirror,
            times,
            threshold=config.divergence.threshold,
            metric=config.divergence.metric,
            mode=config.divergence.mode,
        )
        timings["divergence_s"] = time.perf_counter() - tick
        data["divergence"] = result
        trailer = (
            f"# t_star={_fmt(result.t_star)}"
            if result.reached
            else "# t_star=not_reached"
        )
        payload["divergence"] = (
            ["t", "var_qm", "var_cl", "abs_diff"],
            zip(
                result.times,
                result.quantum_variance,
                result.classical_variance,
                result.difference,
            ),
            trailer,
        )

    if "degeneracy" in outputs:
        energies = spectrum.energies
        gaps = np.diff(energies)
        flags = flag_near_degenerate(energies, config.degeneracy_ratio)
        data["degeneracy"] = (gaps, flags)
        rows = [
            (geometry.barrier_left, n, energies[n], gaps[n], bool(flags[n]))
            for n in range(gaps.size)
        ]
        payload["degeneracy"] = (["position", "n", "E_n", "gap_n", "flag"], rows, None)

    if "splitting" in outputs:
        report = splitting_report(spectrum)
        data["splitting"] = report
        payload["splitting"] = (
            _SPLITTING_HEADER,
            [
                (
                    report.pair_index,
                    report.e_lower,
                    report.e_upper,
                    report.gap,
                    report.estimated_gap,
                    report.instanton_action,
                )
            ],
            None,
        )

    if "density" in outputs:
        xs = np.linspace(0.0, geometry.total_length, config.x_samples)
        frame_times = np.linspace(config.window.start, config.window.end, config.frames)
        rows = []
        frames = []
        for t in frame_times:
            psi = wavefunction_at(field, xs, float(t))
            dens = (psi.conj() * psi).real
            frames.append(dens)
            rows.extend(zip(xs, np.full_like(xs, t), psi.real, psi.imag, dens))
        data["density"] = (xs, frame_times, np.array(frames))
        payload["density"] = (["x", "t", "re_psi", "im_psi", "density"], rows, None)

    return payload, captured, warning_texts, timings, data


def _check_outputs(names) -> frozenset:
    allowed = set(OUTPUT_NAMES) | set(_RUNNER_ONLY_OUTPUTS)
    for name in names:
        if name not in allowed:
            raise ConfigError(f"unknown output {name!r}")
    return frozenset(names)


def _finalize(out_dir: Path, manifest: dict, errors: int, total: int) -> dict:
    if errors == 0:
        manifest["status"] = "ok"
    elif errors == total:
        manifest["status"] = "failed"
    else:
        manifest["status"] = "partial"
    text = json.dumps(manifest, indent=2, sort_keys=True)
    (out_dir / "manifest.json").write_text(text + "\n", encoding="utf-8")
    return manifest


def run_experiment(
    config: ExperimentConfig, out_dir, outputs=None, plot: bool = False
) -> dict:
    """Execute the configured run and write CSVs plus ``manifest.json``.

    ``outputs`` overrides the config's enabled output list (the command
    front ends use this to pin verb-specific products such as the raw
    spectrum table).  Returns the manifest.  Points run serially in sweep
    order, so output files and the manifest are reproducible.
    """
    wanted = _check_outputs(tuple(outputs) if outputs is not None else config.outputs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    points = _sweep_points(config)
    entries = []
    volatile_timings = []
    failures = 0
    for index, value, geometry in points:
        entry = {
            "index": index,
            "sweep_value": value,
            "geometry": _geometry_mapping(geometry),
            "captured_norm": None,
            "warnings": [],
            "files": {},
            "error": None,
        }
        timings: dict = {}
        try:
            payload, captured, warning_texts, timings, point_data = _point_payload(
                config, geometry, wanted
            )
        except _POINT_ERRORS as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            failures += 1
        else:
            entry["captured_norm"] = captured
            entry["warnings"] = warning_texts
            for name, (header, rows, trailer) in payload.items():
                filename = f"{name}_{index:03d}.csv"
                write_csv(out / filename, header, rows, trailer)
                entry["files"][name] = filename
            if plot:
                from . import plots

                entry["figures"] = plots.render_point(
                    out, index, config, point_data, tuple(entry["files"])
                )
        entries.append(entry)
        volatile_timings.append(timings)

    manifest = {
        "version": __version__,
        "config": config.as_mapping(),
        "outputs": sorted(wanted),
        "points": entries,
        "volatile": {
            "created_unix": time.time(),
            "point_timings_s": volatile_timings,
        },
    }
    return _finalize(out, manifest, failures, len(points))


def run_scan(
    config: ExperimentConfig, out_dir, outputs=None, plot: bool = False
) -> dict:
    """Position-resolved products: spectra vs barrier position in one table.

    Unlike :func:`run_experiment` this aggregates every sweep point into a
    single file per output (the position is a column), which is the shape
    the cross-position analyses expect.
    """
    if config.sweep is None or config.sweep.axis != "barrier_position":
        raise ConfigError(
            "scan needs a [sweep] section with axis = barrier_position"
        )
    wanted = ("degeneracy", "entropy") if outputs is None else tuple(outputs)
    for name in wanted:
        if name not in ("degeneracy", "entropy"):
            raise ConfigError(f"scan cannot produce output {name!r}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    positions = config.sweep.values
    times = config.window.times()

    files: dict[str, str] = {}
    point_errors: dict[str, list] = {}
    timings: dict[str, float] = {}

    if "degeneracy" in wanted:
        tick = time.perf_counter()
        scan = degeneracy_scan(
            config.geometry,
            config.constants,
            positions,
            n_levels=config.n_levels,
            degeneracy_ratio=config.degeneracy_ratio,
        )
        timings["degeneracy_s"] = time.perf_counter() - tick
        rows = []
        for i, position in enumerate(scan.positions):
            if scan.errors[i] is not None:
                continue
            energies = scan.energy_profiles[i]
            gaps = scan.gap_profiles[i]
            flags = scan.near_degenerate_flags[i]
            rows.extend(
                (position, n, energies[n], gaps[n], bool(flags[n]))
                for n in range(gaps.size)
            )
        write_csv(
            out / "degeneracy.csv",
            ["position", "n", "E_n", "gap_n", "flag"],
            rows,
        )
        files["degeneracy"] = "degeneracy.csv"
        point_errors["degeneracy"] = list(scan.errors)
        if plot:
            from . import plots

            files["degeneracy_figure"] = plots.render_degeneracy_scan(out, scan)

    if "entropy" in wanted:
        tick = time.perf_counter()
        scan = entropy_vs_position(
            config.geometry,
            config.constants,
            config.packet,
            positions,
            times,
            n_levels=config.n_levels,
            entropy_resolution=config.entropy_resolution,
        )
        timings["entropy_s"] = time.perf_counter() - tick
        rows = []
        for i, position in enumerate(scan.positions):
            if scan.errors[i] is not None:
                continue
            rows.extend(zip(np.full_like(times, position), times, scan.entropies[i]))
        write_csv(out / "entropy_positions.csv", ["position", "t", "entropy"], rows)
        files["entropy"] = "entropy_positions.csv"
        point_errors["entropy"] = list(scan.errors)
        if plot:
            from . import plots

            files["entropy_figure"] = plots.render_entropy_scan(out, scan)

    failed_positions = 0
    for i in range(len(positions)):
        if any(errors[i] is not None for errors in point_errors.values()):
            failed_positions += 1

    manifest = {
        "version": __version__,
        "config": config.as_mapping(),
        "outputs": sorted(wanted),
        "positions": list(positions),
        "errors": point_errors,
        "files": files,
        "volatile": {"created_unix": time.time(), "timings_s": timings},
    }
    return _finalize(out, manifest, failed_positions, len(positions))


def describe_config(config: ExperimentConfig) -> str:
    """Human-readable summary of what a run with this config would do."""
    g = config.geometry
    lines = [
        f"constants: {config.preset} (hbar={_fmt(config.constants.hbar)}, "
        f"mass={_fmt(config.constants.mass)})",
        f"box: [0, {_fmt(g.total_length)}] with barrier "
        f"[{_fmt(g.barrier_left)}, {_fmt(g.barrier_right)}], "
        f"height {_fmt(g.barrier_height)}",
        f"packet: center={_fmt(config.packet.center)}, "
        f"width={_fmt(config.packet.width)}, "
        f"momentum={_fmt(config.packet.momentum)}",
        f"levels: {config.n_levels}",
        f"window: t in [{_fmt(config.window.start)}, {_fmt(config.window.end)}], "
        f"{config.window.samples} samples",
    ]
    if config.sweep is not None:
        values = ", ".join(_fmt(v) for v in config.sweep.values)
        lines.append(f"sweep: {config.sweep.axis} over [{values}]")
    if g.is_free_box:
        lines.append("free box: closed-form spectrum in use")

    spectrum = solve_spectrum(g, config.constants, config.n_levels)
    preview = spectrum.energies[: min(10, len(spectrum))]
    lines.append("first levels:")
    lines.extend(
        f"  E_{n} = {_fmt(e)}" for n, e in enumerate(preview)
    )

    failure = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            field = project_packet(spectrum, config.packet)
        except ProjectionError as exc:
            failure = str(exc)
    if failure is None:
        lines.append(f"captured norm: {field.captured_norm:.6f}")
    else:
        lines.append(f"projection fails: {failure}")
    notes = [str(w.message) for w in caught]
    if config.preset == "paper":
        notes.append(
            "absolute times and lengths inherit the preset's unit choices; "
            "only dimensionless ratios are scale-free"
        )
    if notes:
        lines.append("warnings:")
        lines.extend(f"  - {note}" for note in notes)
    return "\n".join(lines)
