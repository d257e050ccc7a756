"""Observable pipeline checked against closed forms and dense quadrature."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from tunnelwell.errors import ConsistencyError
from tunnelwell.geometry import WellGeometry
from tunnelwell.observables import (
    _quadratic_form,
    position_moments,
    region_overlap,
    rhs_probability,
    spatial_entropy,
    time_series,
)
from tunnelwell.packet import PacketSpec, density_profile, project_packet
from tunnelwell.spectrum import solve_spectrum

PACKET = PacketSpec(center=11.0, width=3.0)


def sine_box_overlap(m: int, n: int, length: float, lo: float, hi: float) -> float:
    """Closed-form overlap of free-box modes m, n (1-based) over [lo, hi]."""

    def antiderivative(x):
        if m == n:
            return x / length - math.sin(2 * m * math.pi * x / length) / (
                2 * m * math.pi
            )
        d, s = m - n, m + n
        return math.sin(d * math.pi * x / length) / (d * math.pi) - math.sin(
            s * math.pi * x / length
        ) / (s * math.pi)

    return antiderivative(hi) - antiderivative(lo)


def lone_field(field, weights: dict[int, complex]):
    """Copy of ``field`` carrying only the given state amplitudes."""
    return type(field)(
        spectrum=field.spectrum,
        packet=field.packet,
        coefficients=tuple(
            weights.get(i, 0.0j) for i in range(len(field))
        ),
        captured_norm=sum(abs(c) ** 2 for c in weights.values()),
    )


@pytest.fixture(scope="module")
def med_field(constants):
    geometry = WellGeometry.symmetric(35.0, 3.0, 7.0)
    spectrum = solve_spectrum(geometry, constants, 26)
    return project_packet(spectrum, PACKET)


class TestOverlapMatrices:
    def test_free_box_matches_trig_formula(self, constants):
        geometry = WellGeometry.symmetric(35.0, 3.0, 0.0)
        spectrum = solve_spectrum(geometry, constants, 10)
        L = geometry.total_length
        m = region_overlap(spectrum, 0.5 * L, L)
        for i in range(10):
            for j in range(10):
                want = sine_box_overlap(i + 1, j + 1, L, 0.5 * L, L)
                assert m[i, j] == pytest.approx(want, abs=1e-9)

    def test_full_box_is_identity(self, med_field):
        spectrum = med_field.spectrum
        L = spectrum.geometry.total_length
        gram = region_overlap(spectrum, 0.0, L)
        assert np.max(np.abs(gram - np.eye(len(spectrum)))) < 1e-8

    def test_exact_symmetry_and_cache_reuse(self, med_field):
        spectrum = med_field.spectrum
        m = region_overlap(spectrum, 10.0, 50.0)
        assert np.array_equal(m, m.T)
        assert region_overlap(spectrum, 10.0, 50.0) is m

    def test_halves_partition_the_box(self, med_field):
        spectrum = med_field.spectrum
        L = spectrum.geometry.total_length
        left = region_overlap(spectrum, 0.0, 0.5 * L)
        right = region_overlap(spectrum, 0.5 * L, L)
        full = region_overlap(spectrum, 0.0, L)
        assert np.max(np.abs(left + right - full)) < 1e-12

    def test_rejects_bad_regions(self, med_field):
        spectrum = med_field.spectrum
        for lo, hi in [(-1.0, 5.0), (5.0, 5.0), (0.0, 80.0), (9.0, 3.0)]:
            with pytest.raises(ValueError):
                region_overlap(spectrum, lo, hi)


class TestRhsProbability:
    def test_matches_dense_quadrature(self, med_field):
        geometry = med_field.spectrum.geometry
        xs = np.linspace(geometry.barrier_right, geometry.total_length, 40001)
        for t in (0.0, 3.7, 21.0):
            direct = simpson(density_profile(med_field, xs, t), x=xs)
            assert rhs_probability(med_field, t) == pytest.approx(direct, abs=1e-8)

    def test_explicit_region_override(self, med_field):
        L = med_field.spectrum.geometry.total_length
        xs = np.linspace(0.5 * L, L, 40001)
        direct = simpson(density_profile(med_field, xs, 3.7), x=xs)
        got = rhs_probability(med_field, 3.7, region=(0.5 * L, L))
        assert got == pytest.approx(direct, abs=1e-8)

    def test_initial_mass_sits_left(self, med_field):
        assert rhs_probability(med_field, 0.0) < 1e-6

    def test_two_state_beat_swaps_sides(self, med_field):
        """An equal mix of the ground doublet shuttles across the barrier
        with the textbook half-period pi*hbar/(E1-E0)."""
        spectrum = med_field.spectrum
        gap = spectrum.energies[1] - spectrum.energies[0]
        assert gap > 1e-12
        pair = lone_field(med_field, {0: 1 / math.sqrt(2), 1: 1 / math.sqrt(2)})
        half_beat = math.pi * spectrum.constants.hbar / gap
        r0 = rhs_probability(pair, 0.0)
        r1 = rhs_probability(pair, half_beat)
        assert min(r0, r1) < 0.05
        assert max(r0, r1) > 0.95
        assert abs(r0 + r1 - 1.0) < 0.01

    def test_stays_within_bounds(self, med_field, rng):
        times = rng.uniform(0.0, 5e4, size=64)
        vals = rhs_probability(med_field, times)
        assert np.all(vals >= 0.0)
        assert np.all(vals <= med_field.captured_norm)

    def test_norm_is_conserved(self, med_field):
        spectrum = med_field.spectrum
        L = spectrum.geometry.total_length
        full = region_overlap(spectrum, 0.0, L)
        c = med_field.coefficient_array
        for t in (0.0, 123.0, 9.9e5):
            phase = np.exp(-1j * med_field.energies * t)
            z = (phase * c)[None, :]
            total = _quadratic_form(z, full)[0]
            assert total == pytest.approx(med_field.captured_norm, abs=1e-7)

    def test_complex_contamination_raises(self):
        z = np.array([[1.0 + 0.0j, 1.0j]])
        skew = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ConsistencyError):
            _quadratic_form(z, skew)


class TestMomentsAndEntropy:
    def test_initial_moments_match_packet(self, med_field):
        mean, var = position_moments(med_field, 0.0)
        assert mean == pytest.approx(PACKET.center, abs=0.1)
        assert var == pytest.approx(PACKET.width**2, rel=0.05)

    def test_moments_match_dense_quadrature(self, med_field):
        L = med_field.spectrum.geometry.total_length
        xs = np.linspace(0.0, L, 80001)
        t = 13.0
        dens = density_profile(med_field, xs, t)
        mean_direct = simpson(xs * dens, x=xs) / med_field.captured_norm
        x2_direct = simpson(xs**2 * dens, x=xs) / med_field.captured_norm
        mean, var = position_moments(med_field, t)
        assert mean == pytest.approx(mean_direct, rel=1e-8)
        assert var == pytest.approx(x2_direct - mean_direct**2, rel=1e-7)

    def test_initial_entropy_is_gaussian(self, med_field):
        want = 0.5 * math.log(2.0 * math.pi * math.e * PACKET.width**2)
        assert spatial_entropy(med_field, 0.0) == pytest.approx(want, rel=5e-3)

    def test_entropy_matches_dense_quadrature(self, med_field):
        L = med_field.spectrum.geometry.total_length
        xs = np.linspace(0.0, L, 100001)
        dens = density_profile(med_field, xs, 17.0)
        plogp = np.where(dens > 0.0, dens * np.log(np.where(dens > 0.0, dens, 1.0)), 0.0)
        direct = -simpson(plogp, x=xs)
        assert spatial_entropy(med_field, 17.0, resolution=512) == pytest.approx(
            direct, abs=1e-6
        )

    def test_entropy_grid_refinement_converges(self, med_field):
        coarse = spatial_entropy(med_field, 55.0, resolution=256)
        fine = spatial_entropy(med_field, 55.0, resolution=512)
        assert abs(coarse - fine) < 1e-6

    def test_scalar_in_scalar_out(self, med_field):
        assert isinstance(rhs_probability(med_field, 1.0), float)
        assert isinstance(spatial_entropy(med_field, 1.0), float)
        mean, var = position_moments(med_field, 1.0)
        assert isinstance(mean, float) and isinstance(var, float)
        arr = rhs_probability(med_field, np.array([1.0, 2.0]))
        assert arr.shape == (2,)


class TestTimeSeries:
    def test_agrees_with_pointwise_calls(self, med_field):
        times = np.linspace(0.0, 90.0, 30)
        series = time_series(med_field, times, entropy_resolution=512, chunk=7)
        assert np.allclose(
            series.rhs_probability, rhs_probability(med_field, times), atol=1e-12
        )
        assert np.allclose(
            series.entropy,
            spatial_entropy(med_field, times, resolution=512),
            atol=1e-12,
        )
        mean, var = position_moments(med_field, times)
        assert np.allclose(series.mean_position, mean, atol=1e-12)
        assert np.allclose(series.variance, var, atol=1e-12)
        assert len(series) == 30

    def test_lone_eigenstate_is_static(self, med_field):
        lone = lone_field(med_field, {4: 1.0 + 0.0j})
        series = time_series(lone, np.linspace(0.0, 300.0, 24))
        for column in (
            series.rhs_probability,
            series.entropy,
            series.mean_position,
            series.variance,
        ):
            assert np.ptp(column) < 1e-10

    def test_tall_barrier_pairs_hold_mass_forever(self, constants, box360):
        """Machine-degenerate doublets keep the packet on its side even at
        absurd times; the bitwise-equal pair energies make the cancellation
        exact for all t."""
        spectrum = solve_spectrum(box360, constants, 30)
        field = project_packet(spectrum, PACKET)
        vals = rhs_probability(field, np.array([0.0, 1e3, 1e6]))
        assert np.max(vals) < 1e-10

    def test_rejects_empty_times(self, med_field):
        with pytest.raises(ValueError):
            time_series(med_field, [])
