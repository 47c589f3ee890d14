import numpy as np
import pytest

from nullgauge import bohm, kgm, unitary
from nullgauge.errors import VanishingB0AtPoint
from nullgauge.grid import GridSpec, PhysicalConstants
from nullgauge.states import UnitaryState


def make_unitary(grid, phi=1.0, b0=-1.0, b1=0.0):
    z = np.zeros(grid.n_x)
    return UnitaryState(
        grid,
        np.full(grid.n_x, phi, float), z.copy(),
        np.asarray(b0, float) if np.ndim(b0) else np.full(grid.n_x, b0, float),
        np.asarray(b1, float) if np.ndim(b1) else np.full(grid.n_x, b1, float),
        z.copy(), z.copy(),
    )


class TestGuidanceVelocity:
    def test_zero_b1_means_static(self, grid, consts):
        state = make_unitary(grid, b0=2.0, b1=0.0)
        assert bohm.guidance_velocity(state, 1.0, consts) == 0.0

    def test_uniform_ratio(self, grid, consts):
        state = make_unitary(grid, b0=2.0, b1=1.0)
        assert bohm.guidance_velocity(state, 3.3, consts) == pytest.approx(0.5)

    def test_plane_wave_group_flow(self, consts):
        # unitary image of a plane wave: eB0 = -E, eB1 = -k -> v = k/E
        grid = GridSpec(128, 0.1, 0.02)
        k = 2 * np.pi * 3 / grid.length
        E = np.sqrt(k**2 + consts.m**2)
        state = make_unitary(grid, phi=1.0, b0=-E / consts.e, b1=-k / consts.e)
        v = bohm.guidance_velocity(state, 0.7, consts)
        assert v == pytest.approx(k / E, rel=1e-12)

    def test_vanishing_b0_at_point(self, grid, consts):
        b0 = np.full(grid.n_x, 1.0)
        b0[:4] = 0.0
        state = make_unitary(grid, b0=b0)
        with pytest.raises(VanishingB0AtPoint):
            bohm.guidance_velocity(state, 1.5 * grid.dx, consts)

    def test_matter_rescaling_cancels(self, grid, consts):
        state = make_unitary(grid, phi=0.7, b0=-1.3, b1=0.4)
        scaled = make_unitary(grid, phi=2.1, b0=-1.3, b1=0.4)
        j0a, j1a = -2 * consts.e**2 * state.b0 * state.phi**2, -2 * consts.e**2 * state.b1 * state.phi**2
        assert j1a[0] / j0a[0] == pytest.approx(bohm.guidance_velocity(state, 1.0, consts), rel=1e-14)
        assert bohm.guidance_velocity(state, 1.0, consts) == bohm.guidance_velocity(scaled, 1.0, consts)


class TestChargeDensity:
    def test_vacuum_zero(self, grid, consts):
        assert np.abs(bohm.charge_density(make_unitary(grid, phi=0.0), consts)).max() == 0.0

    def test_uniform_value(self, grid):
        consts = PhysicalConstants(1.4, 1.0)
        b0, phi0 = -1.2, 0.8
        rho = bohm.charge_density(make_unitary(grid, phi=phi0, b0=b0), consts)
        assert rho == pytest.approx(np.full(grid.n_x, -2 * consts.e**2 * b0 * phi0**2), rel=1e-14)

    def test_total_charge_constant_along_run(self, consts):
        grid = GridSpec(128, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.1, sigma=1.5)
        u = unitary.project_continuity(unitary.to_unitary(state, consts).unitary)
        q0 = bohm.charge_density(u, consts).sum() * grid.dx
        for _ in range(200):
            u = unitary.unitary_step(u, consts)
        q = bohm.charge_density(u, consts).sum() * grid.dx
        assert abs(q - q0) / abs(q0) <= 1e-6


class TestAdvection:
    def test_static_field_static_particles(self, grid, consts):
        states = [make_unitary(grid, b0=-1.0, b1=0.0) for _ in range(6)]
        for i, s in enumerate(states):
            s.t = i * grid.dt
        ens = bohm.Ensemble(np.array([1.0, 2.5, 17.0]))
        result = bohm.advect_ensemble(ens, states, consts)
        assert np.abs(result.positions[-1] - result.positions[0]).max() == 0.0
        assert result.stopped == []

    def test_uniform_advection_wraps(self, consts):
        # v = 0.5 everywhere over T = 2 -> displacement exactly 1.0 with wrap
        grid = GridSpec(64, 0.1, 0.02)
        n_slices = round(2.0 / grid.dt) + 1
        states = []
        for i in range(n_slices):
            s = make_unitary(grid, b0=2.0, b1=1.0)
            s.t = i * grid.dt
            states.append(s)
        start = np.array([0.0, 3.0, grid.length - 0.3])
        result = bohm.advect_ensemble(bohm.Ensemble(start), states, consts)
        expected = (start + 1.0) % grid.length
        assert np.abs(result.positions[-1] - expected).max() <= 1e-10
        assert np.abs(result.max_velocity - 0.5).max() <= 1e-14

    def test_b0_crossing_stops_particle(self, consts):
        grid = GridSpec(64, 0.1, 0.02)
        b0 = -np.ones(grid.n_x)
        b0[20:40] = 1.0  # sign structure in space; moving particle crosses it
        states = []
        for i in range(20):
            s = make_unitary(grid, b0=b0, b1=-0.8 * np.ones(grid.n_x))
            s.t = i * grid.dt
            states.append(s)
        start = np.array([17 * grid.dx])  # just left of the sign change, moving right
        result = bohm.advect_ensemble(bohm.Ensemble(start), states, consts)
        assert len(result.stopped) == 1
        assert np.isnan(result.positions[-1][0])


class TestSamplingAndHistogram:
    def test_sampling_deterministic_per_seed(self, consts):
        grid = GridSpec(128, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.2, sigma=1.5)
        u = unitary.to_unitary(state, consts).unitary
        a = bohm.sample_ensemble(u, consts, 500, seed=9)
        b = bohm.sample_ensemble(u, consts, 500, seed=9)
        c = bohm.sample_ensemble(u, consts, 500, seed=10)
        assert np.array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, c.positions)

    def test_sample_matches_density(self, consts):
        grid = GridSpec(128, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.3, sigma=1.5)
        u = unitary.to_unitary(state, consts).unitary
        ens = bohm.sample_ensemble(u, consts, 20000, seed=5)
        hist, _ = bohm.density_histogram(ens.positions, grid.length, 16)
        dens = bohm.field_density_binned(u, consts, 16)
        l1 = np.abs(hist - dens).sum() * grid.length / 16
        assert l1 <= 0.02  # stratified sampling: well below shot noise

    def test_equivariance_small_run(self, consts):
        grid = GridSpec(128, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.15, sigma=1.5, k0=1.0)
        u = unitary.project_continuity(unitary.to_unitary(state, consts).unitary)
        states = unitary.unitary_evolve(u, consts, 100)
        ens = bohm.sample_ensemble(states[0], consts, 4000, seed=12)
        result = bohm.advect_ensemble(ens, states, consts)
        hist, _ = bohm.density_histogram(result.positions[-1], grid.length, 16)
        dens = bohm.field_density_binned(states[-1], consts, 16)
        l1 = np.abs(hist - dens).sum() * grid.length / 16
        assert l1 <= 0.05
