"""Unitary gauge: transform complex solutions to a real field and evolve directly.

Convention (fixed here once and used everywhere): psi = exp(-i theta) * phi
with phi real, and e B_mu = e A_mu - d_mu theta.  A global sign flip of both
theta and B is an equivalent choice; all quadratic observables agree.

The evolved system is

    phi_dd = lap(phi) + (e^2 (B^0^2 - B^1^2) - m^2) phi
    B1_dd  = -2 e^2 B^1 phi^2 - d_x(B0_dot)      (space component, exact)
    B0_dd  = continuity closure                  (shared with the em-only module)

The time-time component of the potential equation is a constraint; it is
monitored by ``gauss_residual`` rather than enforced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .emonly import b0_acceleration
from .errors import NanDetected, NodeError, WindingError
from .grid import PhysicalConstants, laplacian_1d, spatial_derivative
from .kgm import kgm_rhs
from .states import ComplexKgmState, UnitaryState

#: Default node threshold as a fraction of max|psi|.
NODE_THRESHOLD_FRACTION = 1e-8


@dataclass
class GaugeTransformResult:
    unitary: UnitaryState
    theta: np.ndarray
    winding: int
    branch_sign: np.ndarray
    node_sites: list


def _unwrap_with_branch(psi: np.ndarray):
    """Continuous phase theta and sign branch so that psi = exp(-i theta) * sign * |psi|.

    Phase jumps near pi between neighbouring sites are attributed to a sign
    flip of the real field (the field passing through zero) rather than to the
    gauge phase, keeping theta smooth.
    """
    alpha = np.angle(psi)
    n = alpha.size
    sign = np.ones(n)
    raw = np.diff(alpha, append=alpha[:1])  # includes the seam step n-1 -> 0
    step = (raw + np.pi) % (2.0 * np.pi) - np.pi
    flip = np.abs(step) > 0.5 * np.pi
    adjusted = np.where(flip, step - np.pi * np.sign(step), step)
    sign_flips = np.where(flip, -1.0, 1.0)
    # cumulative branch and phase along the chain 0..n-1
    sign[1:] = np.cumprod(sign_flips[:-1])
    alpha_cont = alpha[0] + np.concatenate([[0.0], np.cumsum(adjusted[:-1])])
    # loop closure: the sign transported once around must return to +1, and the
    # continuous phase change is 2*pi times the winding number
    loop_sign = float(np.prod(sign_flips))
    total = adjusted.sum()
    winding = int(round(total / (2.0 * np.pi)))
    return alpha_cont, sign, winding, loop_sign, total


def to_unitary(
    state: ComplexKgmState,
    consts: PhysicalConstants,
    node_threshold: float | None = None,
    allow_winding: bool = False,
) -> GaugeTransformResult:
    """Gauge-transform a complex slice to the unitary gauge.

    Raises NodeError when |psi| dips below the node threshold (the phase is
    undefined there) and WindingError when the phase winds around the periodic
    domain, unless allow_winding is set; winding is then absorbed into a linear
    part of theta whose constant gradient is added to B^1 explicitly.
    """
    grid = state.grid
    e = consts.e
    modulus = np.abs(state.psi)
    threshold = (
        node_threshold if node_threshold is not None else NODE_THRESHOLD_FRACTION * float(modulus.max())
    )
    nodes = np.flatnonzero(modulus < threshold)
    if nodes.size:
        raise NodeError(nodes.tolist(), threshold)

    alpha_cont, sign, winding, loop_sign, _total = _unwrap_with_branch(state.psi)
    if loop_sign < 0:
        raise WindingError(winding + 0.5)
    if winding != 0 and not allow_winding:
        raise WindingError(winding)

    theta = -alpha_cont  # psi = exp(-i theta) * phi with phi = sign * |psi|
    phi = sign * modulus
    psibar_dot = state.psi_dot * np.conj(state.psi)
    phi_dot = np.real(psibar_dot) / phi
    theta_dot = -np.imag(psibar_dot) / modulus**2
    psi_dd, _, _ = kgm_rhs(state, consts)
    theta_ddot = (
        -np.imag(psi_dd * np.conj(state.psi)) / modulus**2
        + np.imag(psibar_dot**2) / modulus**4
    )

    # theta may contain a linear (winding) part; differentiate its periodic remainder
    k_wind = -2.0 * np.pi * winding / grid.length
    theta_periodic = theta - k_wind * grid.x
    dtheta = spatial_derivative(theta_periodic, grid) + k_wind

    b0 = state.a0 - theta_dot / e
    b1 = state.a1 + dtheta / e
    b0_dot = state.a0_dot - theta_ddot / e
    b1_dot = state.a1_dot + spatial_derivative(theta_dot, grid) / e

    unitary = UnitaryState(grid, phi, phi_dot, b0, b1, b0_dot, b1_dot, t=state.t)
    return GaugeTransformResult(
        unitary=unitary, theta=theta, winding=winding, branch_sign=sign, node_sites=[]
    )


def unitary_rhs(state: UnitaryState, consts: PhysicalConstants):
    """Second time derivatives (phi_dd, b0_dd, b1_dd) of the unitary-gauge system."""
    grid = state.grid
    b0_dd, phi_dd = b0_acceleration(
        state.phi, state.phi_dot, state.b0, state.b1, state.b0_dot, state.b1_dot,
        grid, consts, t=state.t,
    )
    b1_dd = -2.0 * consts.e**2 * state.b1 * state.phi**2 - spatial_derivative(state.b0_dot, grid)
    return phi_dd, b0_dd, b1_dd


def unitary_step(state: UnitaryState, consts: PhysicalConstants) -> UnitaryState:
    """One classical RK4 step of size grid.dt."""
    grid = state.grid
    dt = grid.dt

    def deriv(y, t):
        s = UnitaryState(grid, *y, t=t)
        phi_dd, b0_dd, b1_dd = unitary_rhs(s, consts)
        return (y[1], phi_dd, y[4], y[5], b0_dd, b1_dd)

    y = (state.phi, state.phi_dot, state.b0, state.b1, state.b0_dot, state.b1_dot)
    k1 = deriv(y, state.t)
    k2 = deriv(tuple(a + 0.5 * dt * b for a, b in zip(y, k1)), state.t + 0.5 * dt)
    k3 = deriv(tuple(a + 0.5 * dt * b for a, b in zip(y, k2)), state.t + 0.5 * dt)
    k4 = deriv(tuple(a + dt * b for a, b in zip(y, k3)), state.t + dt)
    y1 = tuple(a + dt / 6.0 * (b + 2 * c + 2 * d + f) for a, b, c, d, f in zip(y, k1, k2, k3, k4))
    for name, arr in zip(("phi", "phi_dot", "b0", "b1", "b0_dot", "b1_dot"), y1):
        if not np.all(np.isfinite(arr)):
            raise NanDetected(f"unitary {name}", state.t + dt)
    return UnitaryState(grid, *y1, t=state.t + dt)


def unitary_evolve(state: UnitaryState, consts: PhysicalConstants, n_steps: int):
    out = [state]
    for _ in range(n_steps):
        state = unitary_step(state, consts)
        out.append(state)
    return out


def unitary_current(state: UnitaryState, consts: PhysicalConstants):
    """Contravariant current (j^0, j^1) = -2 e^2 (B^0, B^1) phi^2."""
    f = -2.0 * consts.e**2 * state.phi**2
    return f * state.b0, f * state.b1


def unitary_lagrangian_density(state: UnitaryState, consts: PhysicalConstants) -> np.ndarray:
    """Half-normalized Lagrangian density of the real-field system.

    density = 1/2 (B1_dot + d_x B^0)^2 + e^2/2 (B^0^2 - B^1^2) phi^2
              + 1/2 (phi_dot^2 - phi'^2 - m^2 phi^2).

    Diagnostic normalization: uniform static phi0 with B = 0 gives -m^2 phi0^2 / 2.
    The evolved equations carry the current coupling -2 e^2 B phi^2; see the
    field-equation residual helpers for the matching variational check.
    """
    e, m = consts.e, consts.m
    grid = state.grid
    f01 = state.b1_dot + spatial_derivative(state.b0, grid)
    dphi = spatial_derivative(state.phi, grid)
    return (
        0.5 * f01**2
        + 0.5 * e**2 * (state.b0**2 - state.b1**2) * state.phi**2
        + 0.5 * (state.phi_dot**2 - dphi**2 - m**2 * state.phi**2)
    )


def gauss_residual(state: UnitaryState, consts: PhysicalConstants) -> np.ndarray:
    """Monitored time-time constraint: -lap(B^0) - d_x(B1_dot) - (j^0 - <j^0>)."""
    grid = state.grid
    j0, _ = unitary_current(state, consts)
    return -laplacian_1d(state.b0, grid) - spatial_derivative(state.b1_dot, grid) - (j0 - j0.mean())


def continuity_residual(state: UnitaryState) -> np.ndarray:
    """Divided continuity relation; identically zero on gauge images of complex solutions."""
    grid = state.grid
    return (
        (state.b0_dot + spatial_derivative(state.b1, grid)) * state.phi
        + 2.0 * state.b0 * state.phi_dot
        + 2.0 * state.b1 * spatial_derivative(state.phi, grid)
    )


def project_continuity(state: UnitaryState) -> UnitaryState:
    """Replace phi_dot by the value zeroing the discrete continuity residual exactly."""
    grid = state.grid
    num = (
        (state.b0_dot + spatial_derivative(state.b1, grid)) * state.phi
        + 2.0 * state.b1 * spatial_derivative(state.phi, grid)
    )
    out = state.copy()
    out.phi_dot = -num / (2.0 * state.b0)
    return out


def wave_equation_residual(state: UnitaryState, consts: PhysicalConstants, phi_ddot: np.ndarray) -> np.ndarray:
    """Residual of the real-field wave equation given a measured phi_ddot."""
    e, m = consts.e, consts.m
    return phi_ddot - laplacian_1d(state.phi, state.grid) - (
        e**2 * (state.b0**2 - state.b1**2) - m**2
    ) * state.phi
