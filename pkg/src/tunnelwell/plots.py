"""Figure rendering for runs: one PNG next to each CSV.

Imported only when plotting is requested, and forces the Agg backend so
runs work headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 120


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def _spectrum_figure(spectrum, path) -> None:
    fig, ax = plt.subplots(figsize=(3.2, 5.0))
    ax.hlines(spectrum.energies, 0.0, 1.0, lw=1.0, color="tab:blue")
    top = spectrum.geometry.barrier_height
    if top > 0.0:
        ax.axhline(top, color="tab:red", ls="--", lw=1.0, label="barrier top")
        ax.legend(loc="upper left", fontsize=8)
    ax.set_xticks([])
    ax.set_ylabel("energy")
    ax.set_title(f"{len(spectrum)} levels")
    _save(fig, path)


def _series_figure(times, values, ylabel, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    ax.plot(times, values, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    _save(fig, path)


def _variance_figure(series, path) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 4.6), sharex=True)
    axes[0].plot(series.times, series.mean_position, lw=1.0)
    axes[0].set_ylabel("mean x")
    axes[1].plot(series.times, series.variance, lw=1.0, color="tab:orange")
    axes[1].set_ylabel("variance")
    axes[1].set_xlabel("t")
    _save(fig, path)


def _divergence_figure(result, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(result.times, result.quantum_variance, lw=1.0, label="quantum")
    ax.plot(result.times, result.classical_variance, lw=1.0, label="classical")
    ax.plot(result.times, result.difference, lw=0.8, ls=":", label="difference")
    ax.axhline(result.threshold, color="tab:red", ls="--", lw=0.8)
    if result.reached:
        ax.axvline(result.t_star, color="tab:red", lw=0.8)
        ax.set_title(f"threshold first crossed at t = {result.t_star:.4g}")
    else:
        ax.set_title("threshold not reached")
    ax.set_xlabel("t")
    ax.set_ylabel("position variance")
    ax.legend(fontsize=8)
    _save(fig, path)


def _degeneracy_figure(gaps, flags, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    n = np.arange(gaps.size)
    ax.semilogy(n, gaps, "o-", ms=3, lw=0.8, label="gap")
    if flags.any():
        ax.semilogy(
            n[flags], gaps[flags], "o", ms=5, color="tab:red", label="near-degenerate"
        )
    ax.set_xlabel("gap index")
    ax.set_ylabel("level gap")
    ax.legend(fontsize=8)
    _save(fig, path)


def _splitting_figure(report, path) -> None:
    fig, ax = plt.subplots(figsize=(3.6, 3.6))
    ax.bar([0, 1], [report.gap, report.estimated_gap], color=["tab:blue", "tab:orange"])
    ax.set_xticks([0, 1], ["measured", "estimated"])
    ax.set_yscale("log")
    ax.set_ylabel(f"pair {report.pair_index} splitting")
    _save(fig, path)


def _density_figure(xs, frame_times, frames, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    cmap = plt.get_cmap("viridis")
    span = frame_times[-1] - frame_times[0]
    for t, dens in zip(frame_times, frames):
        shade = 0.0 if span == 0.0 else (t - frame_times[0]) / span
        ax.plot(xs, dens, lw=0.9, color=cmap(shade), label=f"t={t:.4g}")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    if len(frame_times) <= 10:
        ax.legend(fontsize=7)
    _save(fig, path)


def render_point(out_dir, index, config, data, names) -> dict:
    """Render one figure per written CSV; returns name -> PNG filename."""
    figures = {}

    def emit(name, draw, *args):
        filename = f"{name}_{index:03d}.png"
        draw(*args, out_dir / filename)
        figures[name] = filename

    if "spectrum" in names:
        emit("spectrum", _spectrum_figure, data["spectrum"])
    series = data.get("series")
    if series is not None:
        if "rhs_prob" in names:
            emit(
                "rhs_prob",
                _series_figure,
                series.times,
                series.rhs_probability,
                "right-chamber probability",
            )
        if "entropy" in names:
            emit("entropy", _series_figure, series.times, series.entropy, "entropy")
        if "variance" in names:
            emit("variance", _variance_figure, series)
    if "divergence" in names:
        emit("divergence", _divergence_figure, data["divergence"])
    if "degeneracy" in names:
        gaps, flags = data["degeneracy"]
        emit("degeneracy", _degeneracy_figure, gaps, flags)
    if "splitting" in names:
        emit("splitting", _splitting_figure, data["splitting"])
    if "density" in names:
        xs, frame_times, frames = data["density"]
        emit("density", _density_figure, xs, frame_times, frames)
    return figures


def render_degeneracy_scan(out_dir, scan) -> str:
    filename = "degeneracy_counts.png"
    counts = [scan.flagged_count(i) for i in range(len(scan.positions))]
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    ax.plot(scan.positions, counts, "o-", lw=0.9)
    ax.set_xlabel("barrier position")
    ax.set_ylabel("near-degenerate gaps")
    _save(fig, out_dir / filename)
    return filename


def render_entropy_scan(out_dir, scan) -> str:
    filename = "entropy_positions.png"
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    cmap = plt.get_cmap("viridis")
    n = max(len(scan.positions) - 1, 1)
    for i, position in enumerate(scan.positions):
        if scan.errors[i] is not None:
            continue
        ax.plot(
            scan.times,
            scan.entropies[i],
            lw=0.9,
            color=cmap(i / n),
            label=f"c={position:.4g}",
        )
    ax.set_xlabel("t")
    ax.set_ylabel("entropy")
    if len(scan.positions) <= 10:
        ax.legend(fontsize=7)
    _save(fig, out_dir / filename)
    return filename
