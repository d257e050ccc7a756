"""Quantum dynamics of a particle in a hard-walled box with one barrier.

The package solves the bound spectrum of the box-plus-barrier potential,
expands Gaussian packets over it, and follows the observables that expose
tunneling: chamber probabilities, spatial entropy, position variance, the
divergence from a matched classical bouncing packet, near-degeneracy of
the level ladder, and semiclassical splitting estimates.  The ``tunnelwell``
command drives the same pipeline from configuration files.
"""

from ._version import __version__
from .analytics import (
    DegeneracyScan,
    EntropyScan,
    SplittingReport,
    TunnelingTimes,
    degeneracy_scan,
    entropy_vs_position,
    flag_near_degenerate,
    instanton_action,
    splitting_estimate,
    splitting_report,
    tunneling_time_estimates,
)
from .classical import (
    ClassicalPacket,
    DivergenceResult,
    classical_density,
    classical_variance,
    divergence_time,
    matched_packet,
)
from .config import (
    DivergenceSettings,
    ExperimentConfig,
    SweepSpec,
    TimeWindow,
    default_config,
    load_config,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    ProjectionError,
    SpectrumError,
    TunnelwellError,
)
from .geometry import (
    PhysicalConstants,
    WellGeometry,
    constants_preset,
    natural_constants,
    paper_constants,
)
from .observables import (
    TimeSeries,
    position_moments,
    region_overlap,
    rhs_probability,
    spatial_entropy,
    time_series,
)
from .packet import (
    PacketSpec,
    WaveField,
    density_profile,
    energy_expectation,
    initial_wavefunction,
    project_packet,
    wavefunction_at,
)
from .runner import describe_config, run_experiment, run_scan
from .spectrum import (
    Eigenstate,
    Spectrum,
    characteristic_value,
    eigenfunction_eval,
    solve_spectrum,
)

__all__ = [
    "__version__",
    "ClassicalPacket",
    "ConfigError",
    "ConsistencyError",
    "DegeneracyScan",
    "DivergenceResult",
    "DivergenceSettings",
    "Eigenstate",
    "EntropyScan",
    "ExperimentConfig",
    "PacketSpec",
    "PhysicalConstants",
    "ProjectionError",
    "Spectrum",
    "SpectrumError",
    "SplittingReport",
    "SweepSpec",
    "TimeSeries",
    "TimeWindow",
    "TunnelingTimes",
    "TunnelwellError",
    "WaveField",
    "WellGeometry",
    "characteristic_value",
    "classical_density",
    "classical_variance",
    "constants_preset",
    "default_config",
    "degeneracy_scan",
    "density_profile",
    "describe_config",
    "divergence_time",
    "eigenfunction_eval",
    "energy_expectation",
    "entropy_vs_position",
    "flag_near_degenerate",
    "initial_wavefunction",
    "instanton_action",
    "load_config",
    "matched_packet",
    "natural_constants",
    "paper_constants",
    "position_moments",
    "project_packet",
    "region_overlap",
    "rhs_probability",
    "run_experiment",
    "run_scan",
    "solve_spectrum",
    "spatial_entropy",
    "splitting_estimate",
    "splitting_report",
    "time_series",
    "tunneling_time_estimates",
    "wavefunction_at",
]
