import math

import numpy as np
import pytest

from nullgauge import kgm
from nullgauge.errors import FieldShapeError
from nullgauge.grid import GridSpec, PhysicalConstants
from nullgauge.states import ComplexKgmState


def uniform_state(grid, psi=0.0, psi_dot=0.0, a0=0.0, a1=0.0):
    z = np.zeros(grid.n_x)
    return ComplexKgmState(
        grid,
        np.full(grid.n_x, psi, complex),
        np.full(grid.n_x, psi_dot, complex),
        np.full(grid.n_x, a0, float),
        np.full(grid.n_x, a1, float),
        z, z.copy(),
    )


class TestCurrent:
    def test_real_field_zero_potential_gives_zero(self, grid, consts):
        state = uniform_state(grid, psi=1.3)
        state.psi += 0.2 * np.cos(2 * np.pi * grid.x / grid.length)
        j0, j1 = kgm.kg_current(state, consts)
        assert np.abs(j0).max() == 0.0
        assert np.abs(j1).max() == 0.0

    def test_rotating_uniform_field(self, grid):
        # psi = exp(-iEt) at t=0: psi=1, psi_dot=-iE -> j0 = 2eE, j1 = 0
        E, e = 1.4, 0.7
        consts = PhysicalConstants(e, 1.0)
        state = uniform_state(grid, psi=1.0, psi_dot=-1j * E)
        j0, j1 = kgm.kg_current(state, consts)
        assert j0 == pytest.approx(np.full(grid.n_x, 2 * e * E), abs=1e-14)
        assert np.abs(j1).max() == 0.0

    def test_static_field_in_scalar_potential(self, grid):
        e, a0 = 1.2, 0.8
        consts = PhysicalConstants(e, 1.0)
        state = uniform_state(grid, psi=1.0, a0=a0)
        j0, _ = kgm.kg_current(state, consts)
        assert j0 == pytest.approx(np.full(grid.n_x, -2 * e**2 * a0), abs=1e-14)


class TestRhs:
    def test_zero_state(self, grid, consts):
        psi_dd, a0_dd, a1_dd = kgm.kgm_rhs(uniform_state(grid), consts)
        for f in (psi_dd, a0_dd, a1_dd):
            assert np.abs(f).max() == 0.0

    def test_free_dispersion(self, grid):
        # e=0 decouples; the lattice eigenmode obeys psi_dd = -(k_hat^2 + m^2) psi
        consts = PhysicalConstants(1e-30, 1.0)  # e=0 is rejected; use negligible charge
        m = consts.m
        k = 2 * np.pi * 3 / grid.length
        k_hat2 = (2 - 2 * math.cos(k * grid.dx)) / grid.dx**2
        omega2 = k_hat2 + m**2
        psi = np.exp(1j * k * grid.x)
        state = ComplexKgmState(
            grid, psi, -1j * math.sqrt(omega2) * psi,
            np.zeros(grid.n_x), np.zeros(grid.n_x), np.zeros(grid.n_x), np.zeros(grid.n_x),
        )
        psi_dd, _, _ = kgm.kgm_rhs(state, consts)
        assert np.abs(psi_dd + omega2 * psi).max() <= 1e-10

    def test_uniform_rest_field(self, grid, consts):
        state = uniform_state(grid, psi=1.0)
        psi_dd, a0_dd, a1_dd = kgm.kgm_rhs(state, consts)
        assert psi_dd == pytest.approx(np.full(grid.n_x, -consts.m**2 + 0j), abs=1e-14)
        # uniform charge is entirely background: the potential does not accelerate
        assert np.abs(a0_dd).max() <= 1e-14
        assert np.abs(a1_dd).max() == 0.0


class TestStep:
    def test_zero_stays_zero(self, grid, consts):
        s = kgm.kgm_step(uniform_state(grid), consts)
        assert np.abs(s.psi).max() == 0.0
        assert s.t == pytest.approx(grid.dt)

    def test_free_plane_wave_period_return(self):
        grid = GridSpec(128, 0.2, 0.02)
        consts = PhysicalConstants(1e-30, 1.0)
        state = kgm.plane_wave_state(grid, consts, mode=3)
        omega = abs(complex(state.psi_dot[0] / state.psi[0]).imag)
        period = 2 * math.pi / omega
        n_steps = round(period / grid.dt)
        # land exactly on one period by scaling dt slightly
        dt = period / n_steps
        grid2 = GridSpec(grid.n_x, grid.dx, dt)
        state = kgm.plane_wave_state(grid2, consts, mode=3)
        s = state
        for _ in range(n_steps):
            s = kgm.kgm_step(s, consts)
        # semi-discrete eigenmode: the only error is RK4 in time, ~ omega^5 dt^4 T / 120
        bound = omega**5 * dt**4 * period / 120 * 5
        assert np.abs(s.psi - state.psi).max() <= bound

    def test_charge_conservation_small_amplitude(self, consts):
        grid = GridSpec(128, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.05, sigma=1.0)
        q0 = kgm.kgm_diagnostics(state, consts).total_charge
        for _ in range(200):
            state = kgm.kgm_step(state, consts)
        q = kgm.kgm_diagnostics(state, consts).total_charge
        assert abs(q - q0) / abs(q0) <= 1e-6

    def test_lorenz_residual_stays_small_on_compatible_data(self, consts):
        # the packet recipe zeroes both div A and its time derivative initially
        grid = GridSpec(128, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.05, sigma=1.0)
        assert kgm.kgm_diagnostics(state, consts).lorenz_residual_max <= 1e-12
        worst = 0.0
        for _ in range(100):
            state = kgm.kgm_step(state, consts)
            worst = max(worst, kgm.kgm_diagnostics(state, consts).lorenz_residual_max)
        assert worst <= 10 * (grid.dx**2 + grid.dt**2)


class TestDiagnostics:
    def test_zero_state(self, grid, consts):
        d = kgm.kgm_diagnostics(uniform_state(grid), consts)
        assert d.total_charge == 0.0
        assert d.energy == 0.0
        assert d.lorenz_residual_max == 0.0
        assert d.current_divergence_max == 0.0

    def test_uniform_rest_energy(self, grid, consts):
        d = kgm.kgm_diagnostics(uniform_state(grid, psi=1.0), consts)
        assert d.energy == pytest.approx(0.5 * consts.m**2 * grid.length, rel=1e-12)

    def test_plane_wave_energy_constant(self):
        grid = GridSpec(128, 0.2, 0.04)
        consts = PhysicalConstants(1e-30, 1.0)
        state = kgm.plane_wave_state(grid, consts, mode=2)
        e0 = kgm.kgm_energy(state, consts)
        omega = abs(complex(state.psi_dot[0] / state.psi[0]).imag)
        energies = []
        for _ in range(100):
            state = kgm.kgm_step(state, consts)
            energies.append(kgm.kgm_energy(state, consts))
        # semi-discrete eigenmode: only RK4 time error remains, O(dt^4)
        assert max(abs(e - e0) for e in energies) / e0 <= (omega * grid.dt) ** 4


class TestInvariances:
    def test_gauge_covariance(self, consts):
        # The Lorenz-reduced evolution is covariant under its residual gauge
        # freedom, harmonic chi: here chi = c0*t + c1*x with e*c1*L in 2*pi*Z
        # (a winding transform) and a uniform scalar-potential shift.
        def run(state, n):
            for _ in range(n):
                state = kgm.kgm_step(state, consts)
            return state

        errs = []
        for level in range(2):
            grid = GridSpec(128 * 2**level, 0.1 / 2**level, 0.02 / 2**level)
            base = kgm.gaussian_packet_state(grid, consts, amplitude=0.05, sigma=1.0)
            c0 = 0.4
            c1 = 2 * np.pi * 2 / (consts.e * grid.length)
            chi0 = c1 * grid.x  # chi at t=0; d_t chi = c0
            gauged = ComplexKgmState(
                grid,
                np.exp(-1j * consts.e * chi0) * base.psi,
                np.exp(-1j * consts.e * chi0) * (base.psi_dot - 1j * consts.e * c0 * base.psi),
                base.a0 + c0, base.a1 - c1,
                base.a0_dot.copy(), base.a1_dot.copy(),
            )
            n = round(0.5 / grid.dt)
            err = np.abs(np.abs(run(base, n).psi) - np.abs(run(gauged, n).psi)).max()
            errs.append(err)
        # gauge-equivalent data give the same |psi| up to discretization error
        assert errs[0] <= 5e-4
        assert errs[0] / errs[1] >= 3.0

    def test_global_phase_invariance(self, consts):
        grid = GridSpec(128, 0.1, 0.02)
        base = kgm.gaussian_packet_state(grid, consts, amplitude=0.05, sigma=1.0)
        phased = base.copy()
        phased.psi = np.exp(0.7j) * phased.psi
        phased.psi_dot = np.exp(0.7j) * phased.psi_dot
        for _ in range(20):
            base = kgm.kgm_step(base, consts)
            phased = kgm.kgm_step(phased, consts)
        j0a, j1a = kgm.kg_current(base, consts)
        j0b, j1b = kgm.kg_current(phased, consts)
        assert np.abs(j0a - j0b).max() <= 1e-12 * np.abs(j0a).max()
        assert np.abs(j1a - j1b).max() <= 1e-12 * max(np.abs(j1a).max(), 1.0)
        assert np.abs(np.abs(base.psi) - np.abs(phased.psi)).max() <= 1e-13
        ea = kgm.kgm_energy(base, consts)
        eb = kgm.kgm_energy(phased, consts)
        assert abs(ea - eb) <= 1e-12 * ea


class TestRecipes:
    def test_packet_gauss_consistency(self, consts):
        grid = GridSpec(256, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts)
        # the compensated E field satisfies the discrete Gauss law with background
        from nullgauge.grid import spatial_derivative
        j0, _ = kgm.kg_current(state, consts)
        gauss = spatial_derivative(-state.a1_dot, grid) - (j0 - j0.mean())
        assert np.abs(gauss).max() <= 1e-10

    def test_csv_roundtrip(self, tmp_path, consts):
        grid = GridSpec(64, 0.1, 0.02)
        state = kgm.gaussian_packet_state(grid, consts, amplitude=0.1, sigma=0.8)
        rows = ["re_psi,im_psi,re_psi_dot,im_psi_dot,a0,a1,a0_dot,a1_dot"]
        for i in range(grid.n_x):
            rows.append(",".join(format(v, ".17g") for v in (
                state.psi[i].real, state.psi[i].imag,
                state.psi_dot[i].real, state.psi_dot[i].imag,
                state.a0[i], state.a1[i], state.a0_dot[i], state.a1_dot[i],
            )))
        path = tmp_path / "init.csv"
        path.write_text("\n".join(rows) + "\n")
        loaded = kgm.state_from_csv(path, grid)
        assert np.array_equal(loaded.psi, state.psi)
        assert np.array_equal(loaded.a1_dot, state.a1_dot)

    def test_csv_wrong_length_rejected(self, tmp_path):
        grid = GridSpec(64, 0.1, 0.02)
        path = tmp_path / "bad.csv"
        path.write_text("re_psi,im_psi,re_psi_dot,im_psi_dot,a0,a1,a0_dot,a1_dot\n" +
                        "\n".join("1,0,0,0,0,0,0,0" for _ in range(10)) + "\n")
        with pytest.raises(FieldShapeError):
            kgm.state_from_csv(path, grid)
