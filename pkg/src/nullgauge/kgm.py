"""Complex scalar electrodynamics in Lorenz gauge: the reference evolution.

Equations of motion (metric (+,-), natural units):

    psi_dd = lap(psi) - 2ie(A^0 psi_d + A^1 psi') - ie(div A) psi
             + e^2 (A^0^2 - A^1^2) psi - m^2 psi
    A_dd^mu = lap(A^mu) + j^mu            (Lorenz gauge; monitored, not enforced)

with the conserved current

    j^0 = -2e Im(psi* psi_d) - 2e^2 A^0 |psi|^2
    j^1 =  2e Im(psi* psi')  - 2e^2 A^1 |psi|^2.

The spatial mean of j^0 is subtracted in the A^0 equation: a periodic domain
cannot carry net charge, so the mean acts as a uniform neutralizing background.
This is a compactification artifact, not a change of the local dynamics; all
initial-data recipes here produce slices whose discrete Gauss law holds exactly
with that background.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FieldShapeError, NanDetected
from .grid import GridSpec, PhysicalConstants, laplacian_1d, spatial_derivative, spectral_antiderivative
from .states import ComplexKgmState


@dataclass
class KgmDiagnostics:
    total_charge: float
    lorenz_residual_max: float
    energy: float
    current_divergence_max: float


def kg_current(state: ComplexKgmState, consts: PhysicalConstants):
    """Contravariant current components (j^0, j^1) of the charged scalar."""
    e = consts.e
    rho = np.abs(state.psi) ** 2
    j0 = -2.0 * e * np.imag(np.conj(state.psi) * state.psi_dot) - 2.0 * e**2 * state.a0 * rho
    dpsi = spatial_derivative(state.psi, state.grid)
    j1 = 2.0 * e * np.imag(np.conj(state.psi) * dpsi) - 2.0 * e**2 * state.a1 * rho
    return j0, j1


def kgm_rhs(state: ComplexKgmState, consts: PhysicalConstants):
    """Second time derivatives (psi_dd, a0_dd, a1_dd) at the slice."""
    e, m = consts.e, consts.m
    grid = state.grid
    j0, j1 = kg_current(state, consts)
    div_a = state.a0_dot + spatial_derivative(state.a1, grid)
    psi_dd = (
        laplacian_1d(state.psi, grid)
        - 2j * e * (state.a0 * state.psi_dot + state.a1 * spatial_derivative(state.psi, grid))
        - 1j * e * div_a * state.psi
        + e**2 * (state.a0**2 - state.a1**2) * state.psi
        - m**2 * state.psi
    )
    a0_dd = laplacian_1d(state.a0, grid) + j0 - j0.mean()
    a1_dd = laplacian_1d(state.a1, grid) + j1
    return psi_dd, a0_dd, a1_dd


def kgm_step(state: ComplexKgmState, consts: PhysicalConstants) -> ComplexKgmState:
    """One classical RK4 step of size grid.dt."""
    dt = state.grid.dt

    def deriv(y):
        s = ComplexKgmState(state.grid, *y, t=state.t)
        psi_dd, a0_dd, a1_dd = kgm_rhs(s, consts)
        return (y[1], psi_dd, y[4], y[5], a0_dd, a1_dd)

    y0 = (state.psi, state.psi_dot, state.a0, state.a1, state.a0_dot, state.a1_dot)
    k1 = deriv(y0)
    k2 = deriv(tuple(a + 0.5 * dt * b for a, b in zip(y0, k1)))
    k3 = deriv(tuple(a + 0.5 * dt * b for a, b in zip(y0, k2)))
    k4 = deriv(tuple(a + dt * b for a, b in zip(y0, k3)))
    y1 = tuple(a + dt / 6.0 * (b + 2 * c + 2 * d + f) for a, b, c, d, f in zip(y0, k1, k2, k3, k4))
    for name, arr in zip(("psi", "psi_dot", "a0", "a1", "a0_dot", "a1_dot"), y1):
        if not np.all(np.isfinite(arr.view(float) if np.iscomplexobj(arr) else arr)):
            raise NanDetected(f"kgm {name}", state.t + dt)
    return ComplexKgmState(state.grid, *y1, t=state.t + dt)


def kgm_energy(state: ComplexKgmState, consts: PhysicalConstants) -> float:
    """Total energy: electric + covariant-gradient + mass terms, summed times dx.

    Density = 1/2 F01^2 + 1/2 |psi_d + ie A^0 psi|^2 + 1/2 |psi' - ie A^1 psi|^2
              + 1/2 m^2 |psi|^2, the Legendre transform of the half-normalized
    Lagrangian (uniform psi=1 at rest gives density m^2/2).
    """
    e, m = consts.e, consts.m
    grid = state.grid
    f01 = -state.a1_dot - spatial_derivative(state.a0, grid)
    d0psi = state.psi_dot + 1j * e * state.a0 * state.psi
    d1psi = spatial_derivative(state.psi, grid) - 1j * e * state.a1 * state.psi
    density = (
        0.5 * f01**2
        + 0.5 * np.abs(d0psi) ** 2
        + 0.5 * np.abs(d1psi) ** 2
        + 0.5 * m**2 * np.abs(state.psi) ** 2
    )
    return float(density.sum() * grid.dx)


def kgm_diagnostics(state: ComplexKgmState, consts: PhysicalConstants) -> KgmDiagnostics:
    grid = state.grid
    j0, j1 = kg_current(state, consts)
    psi_dd, _, _ = kgm_rhs(state, consts)
    e = consts.e
    rho = np.abs(state.psi) ** 2
    dj0 = (
        -2.0 * e * np.imag(np.conj(state.psi_dot) * state.psi_dot + np.conj(state.psi) * psi_dd)
        - 2.0 * e**2 * (state.a0_dot * rho + 2.0 * state.a0 * np.real(np.conj(state.psi) * state.psi_dot))
    )
    div_j = dj0 + spatial_derivative(j1, grid)
    lorenz = state.a0_dot + spatial_derivative(state.a1, grid)
    return KgmDiagnostics(
        total_charge=float(j0.sum() * grid.dx),
        lorenz_residual_max=float(np.abs(lorenz).max()),
        energy=kgm_energy(state, consts),
        current_divergence_max=float(np.abs(div_j).max()),
    )


def kgm_evolve(state: ComplexKgmState, consts: PhysicalConstants, n_steps: int):
    """Step n_steps times, returning the list of all states including the initial one."""
    out = [state]
    for _ in range(n_steps):
        state = kgm_step(state, consts)
        out.append(state)
    return out


# ---------------------------------------------------------------------------
# initial-data recipes
# ---------------------------------------------------------------------------

def _wrapped_gaussian(x: np.ndarray, x0: float, sigma: float, length: float) -> np.ndarray:
    """Periodic Gaussian envelope (sum over a few images; tails are negligible)."""
    env = np.zeros_like(x)
    for image in range(-2, 3):
        env += np.exp(-((x - x0 + image * length) ** 2) / (2.0 * sigma**2))
    return env


def _gauss_compensated_a1_dot(psi, psi_dot, grid: GridSpec, consts: PhysicalConstants):
    """A1_dot making the discrete Gauss law (with mean background) hold exactly.

    With A = 0 the initial electric field is E = -A1_dot; choosing
    d_x A1_dot = -(j^0 - <j^0>) gives d_x E = j^0 - <j^0> at stencil precision.
    """
    e = consts.e
    j0 = -2.0 * e * np.imag(np.conj(psi) * psi_dot)
    return spectral_antiderivative(-j0, grid)


def gaussian_packet_state(
    grid: GridSpec,
    consts: PhysicalConstants,
    amplitude: float = 0.03,
    sigma: float = 2.0,
    k0: float = 0.0,
    offset: float = 1.0,
    x0: float | None = None,
) -> ComplexKgmState:
    """Gaussian packet riding on a uniform condensate, A = 0, Gauss-compensated E field.

    psi(0) = offset + amplitude * G(x) * exp(i k0 (x - x0)),  psi_dot = -i omega psi
    with omega = sqrt(k0^2 + m^2).  The offset keeps |psi| away from zero (no
    nodes, zero winding) and keeps B^0 = -omega/e + O(amplitude) sign-definite
    after the gauge transform.
    """
    if x0 is None:
        x0 = grid.length / 2.0
    x = grid.x
    env = _wrapped_gaussian(x, x0, sigma, grid.length)
    psi = (offset + amplitude * env * np.exp(1j * k0 * (x - x0))).astype(complex)
    omega = np.sqrt(k0**2 + consts.m**2)
    psi_dot = -1j * omega * psi
    zero = np.zeros(grid.n_x)
    a1_dot = _gauss_compensated_a1_dot(psi, psi_dot, grid, consts)
    return ComplexKgmState(grid, psi, psi_dot, zero, zero.copy(), zero.copy(), a1_dot)


def plane_wave_state(
    grid: GridSpec,
    consts: PhysicalConstants,
    mode: int = 1,
    amplitude: float = 1.0,
    dispersion: str = "discrete",
) -> ComplexKgmState:
    """Free plane wave psi = amplitude * exp(i k x), A = 0, with k = 2*pi*mode/L.

    dispersion="discrete" uses the lattice frequency omega^2 = k_hat^2 + m^2
    with k_hat^2 the 3-point stencil symbol, making the mode an exact eigenmode
    of the semi-discrete free equation; "continuum" uses omega^2 = k^2 + m^2.
    """
    k = 2.0 * np.pi * mode / grid.length
    if dispersion == "discrete":
        k2 = (2.0 - 2.0 * np.cos(k * grid.dx)) / grid.dx**2
    elif dispersion == "continuum":
        k2 = k**2
    else:
        raise ValueError(f"unknown dispersion {dispersion!r}")
    omega = np.sqrt(k2 + consts.m**2)
    psi = amplitude * np.exp(1j * k * grid.x)
    psi_dot = -1j * omega * psi
    zero = np.zeros(grid.n_x)
    return ComplexKgmState(grid, psi, psi_dot, zero, zero.copy(), zero.copy(), zero.copy())


def state_from_csv(path, grid: GridSpec) -> ComplexKgmState:
    """Load a slice from CSV with columns re_psi, im_psi, re_psi_dot, im_psi_dot, a0, a1, a0_dot, a1_dot."""
    cols = ("re_psi", "im_psi", "re_psi_dot", "im_psi_dot", "a0", "a1", "a0_dot", "a1_dot")
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in cols if c not in (reader.fieldnames or [])]
        if missing:
            raise FieldShapeError(f"initial-data CSV missing columns: {missing}")
        rows = [[float(row[c]) for c in cols] for row in reader]
    data = np.asarray(rows, dtype=float)
    if data.shape[0] != grid.n_x:
        raise FieldShapeError(f"initial-data CSV has {data.shape[0]} rows, grid needs {grid.n_x}")
    psi = data[:, 0] + 1j * data[:, 1]
    psi_dot = data[:, 2] + 1j * data[:, 3]
    return ComplexKgmState(grid, psi, psi_dot, data[:, 4], data[:, 5], data[:, 6], data[:, 7])
