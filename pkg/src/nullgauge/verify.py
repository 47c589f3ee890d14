"""Built-in invariant suites behind `nullgauge verify <suite>`.

Each suite is a quick, fixed-configuration battery returning Check records;
the full property coverage lives in the pytest suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bohm, diracflow, emonly, kgm, unitary
from .grid import GridSpec, PhysicalConstants, laplacian_1d, spatial_derivative
from .scenarios import majorana_property_table


@dataclass
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


_GRID = GridSpec(256, 0.1, 0.02)
_CONSTS = PhysicalConstants(1.0, 1.0)


def _packet(grid=_GRID, consts=_CONSTS, **kw):
    return kgm.gaussian_packet_state(grid, consts, **kw)


def verify_stencils():
    grid = _GRID
    k = 2 * np.pi * 5 / grid.length
    f = np.sin(k * grid.x)
    d_err = float(np.abs(spatial_derivative(f, grid) - k * np.cos(k * grid.x)).max())
    l_err = float(np.abs(laplacian_1d(f, grid) + k**2 * np.sin(k * grid.x)).max())
    rng = np.random.default_rng(7)
    g = rng.normal(size=grid.n_x)
    h = rng.normal(size=grid.n_x)
    sbp = abs(float((g * spatial_derivative(h, grid)).sum() + (spatial_derivative(g, grid) * h).sum()))
    return [
        Check("first-derivative-vs-analytic", d_err, k**3 * grid.dx**2 / 6 * 1.1),
        Check("laplacian-vs-analytic", l_err, k**4 * grid.dx**2 / 12 * 1.1),
        Check("summation-by-parts", sbp, 1e-10),
    ]


def verify_kgm():
    state = _packet()
    d0 = kgm.kgm_diagnostics(state, _CONSTS)
    for _ in range(200):
        state = kgm.kgm_step(state, _CONSTS)
    d1 = kgm.kgm_diagnostics(state, _CONSTS)
    drift = abs(d1.total_charge - d0.total_charge) / abs(d0.total_charge)
    return [
        Check("charge-conservation-200-steps", drift, 1e-6),
        Check("current-divergence", d1.current_divergence_max, 1e-4),
    ]


def verify_unitary():
    state = _packet()
    res = unitary.to_unitary(state, _CONSTS)
    roundtrip = float(np.abs(np.exp(-1j * res.theta) * res.unitary.phi - state.psi).max())
    u = unitary.project_continuity(res.unitary)
    g0 = float(np.abs(unitary.gauss_residual(u, _CONSTS)).max())
    for _ in range(100):
        u = unitary.unitary_step(u, _CONSTS)
    g1 = float(np.abs(unitary.gauss_residual(u, _CONSTS)).max())
    c1 = float(np.abs(unitary.continuity_residual(u)).max())
    return [
        Check("transform-roundtrip", roundtrip, 1e-12 * float(np.abs(state.psi).max())),
        Check("gauss-constraint-initial", g0, 1e-10),
        Check("gauss-constraint-evolved", g1, 1e-3),
        Check("continuity-evolved", c1, 1e-8),
    ]


def verify_em_only():
    state = unitary.project_continuity(unitary.to_unitary(_packet(), _CONSTS).unitary)
    em = emonly.project_em_only(state, _CONSTS)
    rep = emonly.reconstruct_report(em, _CONSTS)
    phi_err = float(np.abs(rep.phi_rec - np.abs(state.phi)).max())
    series = emonly.compare_evolutions(state, _CONSTS, t_final=0.5)
    div = math.sqrt(series.l2_b0[-1] ** 2 + series.l2_b1[-1] ** 2)
    bnorm = math.sqrt(float(((state.b0**2 + state.b1**2) * state.grid.dx).sum()))
    return [
        Check("reconstruction-identity", phi_err, 1e-8),
        Check("em-only-vs-direct", div / bnorm, 1e-3),
    ]


def verify_bohm():
    state = unitary.project_continuity(unitary.to_unitary(
        _packet(amplitude=0.15, sigma=1.5, k0=1.0), _CONSTS).unitary)
    states = unitary.unitary_evolve(state, _CONSTS, 150)
    ens = bohm.sample_ensemble(states[0], _CONSTS, 4000, seed=11)
    result = bohm.advect_ensemble(ens, states, _CONSTS)
    hist, _ = bohm.density_histogram(result.positions[-1], state.grid.length, 32)
    dens = bohm.field_density_binned(states[-1], _CONSTS, 32)
    l1 = float(np.abs(hist - dens).sum() * state.grid.length / 32)
    return [Check("ensemble-density-l1", l1, 0.05)]


def verify_dirac_flow():
    pot = diracflow.RapidityPotential(_CONSTS)
    x0 = (0.0, 0.4)
    a0, a1 = pot.a(*x0)
    p = diracflow.RelParticle(np.array(x0), np.array([-_CONSTS.e * a0, -_CONSTS.e * a1]))
    flow = diracflow.flow_line(pot, _CONSTS, x0, 1e-3, 2000)
    worst = 0.0
    for i in range(2000):
        p = diracflow.lorentz_push(p, pot, _CONSTS, 1e-3)
        worst = max(worst, abs(p.x[1] - flow[i + 1, 1]))
    ms = abs(diracflow.mass_shell_residual(p, _CONSTS))
    return [
        Check("push-vs-flow-2000-steps", worst, 1e-8),
        Check("mass-shell", ms, 1e-10),
    ]


def verify_majorana():
    _, _, invariants = majorana_property_table(trials=200, seed=3)
    return [Check(inv["name"], inv["value"], inv["tolerance"]) for inv in invariants]


SUITES = {
    "stencils": verify_stencils,
    "kgm": verify_kgm,
    "unitary": verify_unitary,
    "em-only": verify_em_only,
    "bohm": verify_bohm,
    "dirac-flow": verify_dirac_flow,
    "majorana": verify_majorana,
}
