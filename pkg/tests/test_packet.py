"""Packet projection and evolution against quadrature-free identities."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from tunnelwell.errors import ConfigError, ProjectionError
from tunnelwell.geometry import WellGeometry, natural_constants
from tunnelwell.packet import (
    PacketSpec,
    density_profile,
    energy_expectation,
    initial_wavefunction,
    project_packet,
    wavefunction_at,
)
from tunnelwell.spectrum import solve_spectrum

DEFAULT_PACKET = PacketSpec(center=11.0, width=3.0)


@pytest.fixture(scope="module")
def field(constants, box360):
    spec = solve_spectrum(box360, constants, 30)
    return project_packet(spec, DEFAULT_PACKET)


class TestInitialState:
    def test_peak_density_matches_width(self):
        """|psi(x0)|^2 = 1/sqrt(2 pi sigma^2) for the normalized Gaussian."""
        psi = initial_wavefunction(DEFAULT_PACKET, 11.0)
        assert abs(psi) ** 2 == pytest.approx(1.0 / math.sqrt(18.0 * math.pi), rel=1e-12)

    def test_unit_norm_on_fine_grid(self):
        xs = np.linspace(-40.0, 60.0, 200_001)
        dens = np.abs(initial_wavefunction(DEFAULT_PACKET, xs)) ** 2
        assert simpson(dens, x=xs) == pytest.approx(1.0, abs=1e-12)

    def test_momentum_tilts_the_phase(self):
        packet = PacketSpec(center=11.0, width=3.0, momentum=0.7)
        psi = initial_wavefunction(packet, np.array([11.0, 11.0 + math.pi / 0.7]))
        assert np.angle(psi[0]) == pytest.approx(0.0, abs=1e-12)
        assert abs(np.angle(psi[1])) == pytest.approx(math.pi, abs=1e-9)

    def test_rejects_bad_width(self):
        with pytest.raises(ConfigError):
            PacketSpec(center=11.0, width=0.0)
        with pytest.raises(ConfigError):
            PacketSpec(center=float("inf"), width=3.0)


class TestProjection:
    def test_captured_norm_is_nearly_one(self, field):
        assert field.captured_norm > 0.999
        assert field.captured_norm < 1.0 + 1e-9

    def test_parseval_against_direct_overlap(self, field, box360):
        """Coefficients must reproduce the packet where it has support."""
        xs = np.linspace(0.0, 73.0, 50_001)
        psi0 = initial_wavefunction(field.packet, xs)
        rebuilt = wavefunction_at(field, xs, 0.0)
        err = simpson(np.abs(rebuilt - psi0) ** 2, x=xs)
        assert err < 1e-3  # truncation tail only

    def test_rebuilt_peak_height(self, field):
        got = density_profile(field, 11.0, 0.0)
        assert got == pytest.approx(1.0 / math.sqrt(18.0 * math.pi), rel=1e-2)

    def test_energy_expectation_matches_free_gaussian(self, field):
        # <E> = hbar^2/(2m) (k0^2 + 1/(4 sigma^2)) up to barrier and wall tails
        assert energy_expectation(field) == pytest.approx(1.0 / 36.0, rel=2e-2)

    def test_center_outside_box_is_rejected(self, constants, box360):
        spec = solve_spectrum(box360, constants, 5)
        with pytest.raises(ConfigError):
            project_packet(spec, PacketSpec(center=80.0, width=3.0))

    @pytest.mark.filterwarnings("ignore:captured norm")
    def test_wall_proximity_warns(self, constants, box360):
        spec = solve_spectrum(box360, constants, 30)
        with pytest.warns(UserWarning, match="wall"):
            project_packet(spec, PacketSpec(center=7.0, width=2.5))

    def test_poor_capture_warns(self, constants, box360):
        """A narrow packet needs far more than 8 levels."""
        spec = solve_spectrum(box360, constants, 8)
        with pytest.warns(UserWarning):
            project_packet(spec, PacketSpec(center=11.0, width=3.0))

    def test_hopeless_capture_raises(self, constants, box360):
        spec = solve_spectrum(box360, constants, 4)
        with pytest.raises(ProjectionError):
            project_packet(spec, PacketSpec(center=11.0, width=0.4))


class TestEvolution:
    def test_norm_is_conserved(self, field):
        xs = np.linspace(0.0, 73.0, 20_001)
        for t in (0.0, 7.3, 55.0, 420.0):
            dens = density_profile(field, xs, t)
            assert simpson(dens, x=xs) == pytest.approx(field.captured_norm, abs=1e-6)

    def test_zero_momentum_packet_evolves_time_symmetrically(self, field):
        """With k0 = 0 the coefficients are real, so psi(t) = conj(psi(-t))."""
        xs = np.linspace(1.0, 72.0, 501)
        fwd = wavefunction_at(field, xs, 12.5)
        bwd = wavefunction_at(field, xs, -12.5)
        assert np.max(np.abs(fwd - np.conj(bwd))) < 1e-9

    def test_stationary_state_only_rotates_phase(self, constants, box360):
        spec = solve_spectrum(box360, constants, 30)
        field = project_packet(spec, DEFAULT_PACKET)
        xs = np.linspace(0.0, 73.0, 501)
        d0 = density_profile(field, xs, 0.0)
        # a pure eigenstate's density must not move at all
        lone = type(field)(
            spectrum=field.spectrum,
            packet=field.packet,
            coefficients=tuple(
                1.0 + 0.0j if i == 4 else 0.0j for i in range(len(field))
            ),
            captured_norm=1.0,
        )
        da = density_profile(lone, xs, 0.0)
        db = density_profile(lone, xs, 333.0)
        assert np.max(np.abs(da - db)) < 1e-12
        assert np.max(d0) > 0.0  # sanity on the fixture itself

    def test_early_density_stays_left_of_barrier(self, field):
        """Before any reflection the packet spreads but the barrier still
        holds; the right chamber carries only tunneling tails."""
        xs_right = np.linspace(38.5, 72.5, 801)
        dens = density_profile(field, xs_right, 5.0)
        assert simpson(dens, x=xs_right) < 1e-6
