"""Potential-only dynamics: reconstruct the matter field from (B, B_dot) and step B alone.

The time-time component of the potential equation contains no second time
derivatives; expanded on the lattice it reads

    -lap(B^0) - d_x(B1_dot) = j^0 - background = -2 e^2 B^0 phi^2 - background,

which is solved for phi (positive branch).  Continuity, divided by phi,

    (B0_dot + d_x B^1) phi + 2 B^0 phi_dot + 2 B^1 phi' = 0,

determines phi_dot, and its time derivative determines B0_dd once phi_dd is
replaced by the wave equation for phi.  B1_dd comes from the space component
of the potential equation.  Together these close the system on (B, B_dot).

The closed system is dispersive at high wavenumber (omega ~ k^2/(sqrt(2) e phi),
like a Schroedinger operator), because the reconstruction feeds second space
derivatives of B back into the acceleration.  Explicit stepping therefore
subcycles with dt_sub ~ dx^2; see ``em_stable_dt``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NanDetected, NegativeRadicand, PhiVanishing, VanishingB0
from .grid import GridSpec, PhysicalConstants, laplacian_1d, spatial_derivative
from .states import EmOnlyState, UnitaryState

#: |B0| floor as a fraction of max|B0| on the slice.
B0_FLOOR_FRACTION = 1e-6
#: Radicand tolerance as a fraction of the squared field scale; small negatives
#: within it are clamped to zero.
RADICAND_TOL_FRACTION = 1e-10
#: Fraction of max(phi) below which the acceleration closure refuses to divide.
PHI_FLOOR_FRACTION = 1e-6
#: Safety factor times e * min(phi) * dx^2 bounds the stable explicit substep.
EM_STABILITY_FACTOR = 0.3


@dataclass
class ReconstructionReport:
    phi_rec: np.ndarray
    phi_dot_rec: np.ndarray
    radicand_min: float
    b0_min_abs: float


@dataclass
class FailureRecord:
    t: float
    path: str  # "em-only" or "unitary"
    cause: str


@dataclass
class ComparisonSeries:
    """Per-record divergence between the potential-only and direct trajectories."""

    t: list = field(default_factory=list)
    l2_b0: list = field(default_factory=list)
    l2_b1: list = field(default_factory=list)
    linf_b0: list = field(default_factory=list)
    linf_b1: list = field(default_factory=list)
    radicand_min: list = field(default_factory=list)
    b0_min_abs: list = field(default_factory=list)
    failure: FailureRecord | None = None


def project_em_only(state: UnitaryState, consts: PhysicalConstants) -> EmOnlyState:
    """Drop the matter field, keeping its total charge as the uniform background."""
    j0 = -2.0 * consts.e**2 * state.b0 * state.phi**2
    return EmOnlyState(
        state.grid,
        state.b0.copy(), state.b1.copy(), state.b0_dot.copy(), state.b1_dot.copy(),
        t=state.t, background_charge=float(j0.mean()),
    )


def gauss_numerator(
    em: EmOnlyState,
    fake_b0_ddot: np.ndarray | None = None,
    fake_b1_ddot: np.ndarray | None = None,
) -> np.ndarray:
    """The -2 e^2 B_0 phi^2 side of the time-time potential equation.

    Expanding box(B_0) - d_t(div B) cancels every second time derivative
    algebraically, leaving -lap(B^0) - d_x(B1_dot).  The fake_*_ddot arguments
    exist to witness that cancellation: they are accepted and never used, so
    the output is bit-identical for any injected second-derivative data.
    """
    del fake_b0_ddot, fake_b1_ddot
    return -laplacian_1d(em.b0, em.grid) - spatial_derivative(em.b1_dot, em.grid)


def reconstruction_radicand(em: EmOnlyState, consts: PhysicalConstants) -> np.ndarray:
    """phi^2 as a function of the slice data: (gauss_numerator + background) / (-2 e^2 B_0).

    On-constraint, gauss_numerator equals j^0 - background, so the ratio is
    exactly the matter density factor phi^2.
    """
    return (gauss_numerator(em) + em.background_charge) / (-2.0 * consts.e**2 * em.b0)


def _b0_floor(em: EmOnlyState, b0_floor: float | None) -> float:
    if b0_floor is not None:
        return b0_floor
    return B0_FLOOR_FRACTION * float(np.abs(em.b0).max())


def reconstruct_phi(
    em: EmOnlyState,
    consts: PhysicalConstants,
    b0_floor: float | None = None,
    radicand_tol: float | None = None,
) -> np.ndarray:
    """Positive-branch matter field on the slice.  Sign information is not recoverable."""
    floor = _b0_floor(em, b0_floor)
    low = np.flatnonzero(np.abs(em.b0) < floor)
    if low.size:
        raise VanishingB0(low.tolist(), floor, t=em.t)
    radicand = reconstruction_radicand(em, consts)
    if radicand_tol is None:
        scale = max(float(np.abs(radicand).max()), 1.0)
        radicand_tol = RADICAND_TOL_FRACTION * scale
    bad = np.flatnonzero(radicand < -radicand_tol)
    if bad.size:
        raise NegativeRadicand(float(radicand.min()), radicand_tol, bad.tolist(), t=em.t)
    return np.sqrt(np.maximum(radicand, 0.0))


def reconstruct_phi_dot(
    em: EmOnlyState,
    phi: np.ndarray,
    consts: PhysicalConstants,
    b0_floor: float | None = None,
) -> np.ndarray:
    """phi_dot from continuity, with phi' taken by stencil from the reconstructed phi."""
    floor = _b0_floor(em, b0_floor)
    low = np.flatnonzero(np.abs(em.b0) < floor)
    if low.size:
        raise VanishingB0(low.tolist(), floor, t=em.t)
    grid = em.grid
    num = (em.b0_dot + spatial_derivative(em.b1, grid)) * phi + 2.0 * em.b1 * spatial_derivative(phi, grid)
    return -num / (2.0 * em.b0)


def reconstruct_report(em: EmOnlyState, consts: PhysicalConstants) -> ReconstructionReport:
    radicand = reconstruction_radicand(em, consts)
    phi = reconstruct_phi(em, consts)
    phi_dot = reconstruct_phi_dot(em, phi, consts)
    return ReconstructionReport(
        phi_rec=phi,
        phi_dot_rec=phi_dot,
        radicand_min=float(radicand.min()),
        b0_min_abs=float(np.abs(em.b0).min()),
    )


def b0_acceleration(
    phi: np.ndarray,
    phi_dot: np.ndarray,
    b0: np.ndarray,
    b1: np.ndarray,
    b0_dot: np.ndarray,
    b1_dot: np.ndarray,
    grid: GridSpec,
    consts: PhysicalConstants,
    t: float = 0.0,
):
    """(B0_dd, phi_dd): the continuity closure shared by both evolution routes.

    Differentiating the divided continuity relation in time and substituting
    phi_dd = lap(phi) + (e^2 B_mu B^mu - m^2) phi yields

      B0_dd = -[ d_x(B1_dot) phi + (B0_dot + d_x B^1) phi_dot + 2 B0_dot phi_dot
                 + 2 B^0 phi_dd + 2 B1_dot phi' + 2 B^1 phi_dot' ] / phi.

    A slice with phi identically zero is free Maxwell data; B0_dd is then taken
    to be zero (the gauge is undetermined there).  Partially vanishing phi is an
    error: the closure cannot divide.
    """
    e, m = consts.e, consts.m
    phi_dd = laplacian_1d(phi, grid) + (e**2 * (b0**2 - b1**2) - m**2) * phi
    phi_max = float(np.abs(phi).max())
    if phi_max == 0.0:
        return np.zeros(grid.n_x), phi_dd
    low = np.flatnonzero(np.abs(phi) < PHI_FLOOR_FRACTION * phi_max)
    if low.size:
        raise PhiVanishing(low.tolist(), t=t)
    num = (
        spatial_derivative(b1_dot, grid) * phi
        + (b0_dot + spatial_derivative(b1, grid)) * phi_dot
        + 2.0 * b0_dot * phi_dot
        + 2.0 * b0 * phi_dd
        + 2.0 * b1_dot * spatial_derivative(phi, grid)
        + 2.0 * b1 * spatial_derivative(phi_dot, grid)
    )
    return -num / phi, phi_dd


def em_second_derivatives(em: EmOnlyState, consts: PhysicalConstants):
    """(B0_dd, B1_dd) from the slice alone, via reconstruction and the closure."""
    grid = em.grid
    phi = reconstruct_phi(em, consts)
    phi_dot = reconstruct_phi_dot(em, phi, consts)
    b0_dd, _ = b0_acceleration(phi, phi_dot, em.b0, em.b1, em.b0_dot, em.b1_dot, grid, consts, t=em.t)
    b1_dd = -2.0 * consts.e**2 * em.b1 * phi**2 - spatial_derivative(em.b0_dot, grid)
    return b0_dd, b1_dd


def em_stable_dt(em: EmOnlyState, consts: PhysicalConstants) -> float:
    """Largest safe explicit substep for the stiff reconstruction branch."""
    radicand = reconstruction_radicand(em, consts)
    phi_min = math.sqrt(max(float(radicand.min()), 0.0))
    phi_scale = max(phi_min, 1e-3 * math.sqrt(max(float(radicand.max()), 0.0)), 1e-12)
    return EM_STABILITY_FACTOR * abs(consts.e) * phi_scale * em.grid.dx**2


def em_only_step(em: EmOnlyState, consts: PhysicalConstants, substeps: int | None = None) -> EmOnlyState:
    """Advance t by grid.dt with RK4, subcycling below the stability bound."""
    grid = em.grid
    if substeps is None:
        substeps = max(1, math.ceil(grid.dt / em_stable_dt(em, consts)))
    dt = grid.dt / substeps

    def deriv(y, t):
        s = EmOnlyState(grid, *y, t=t, background_charge=em.background_charge)
        b0_dd, b1_dd = em_second_derivatives(s, consts)
        return (y[2], y[3], b0_dd, b1_dd)

    y = (em.b0, em.b1, em.b0_dot, em.b1_dot)
    t = em.t
    for _ in range(substeps):
        k1 = deriv(y, t)
        k2 = deriv(tuple(a + 0.5 * dt * b for a, b in zip(y, k1)), t + 0.5 * dt)
        k3 = deriv(tuple(a + 0.5 * dt * b for a, b in zip(y, k2)), t + 0.5 * dt)
        k4 = deriv(tuple(a + dt * b for a, b in zip(y, k3)), t + dt)
        y = tuple(a + dt / 6.0 * (b + 2 * c + 2 * d + f) for a, b, c, d, f in zip(y, k1, k2, k3, k4))
        t += dt
        for name, arr in zip(("b0", "b1", "b0_dot", "b1_dot"), y):
            if not np.all(np.isfinite(arr)):
                raise NanDetected(f"em-only {name}", t)
    return EmOnlyState(grid, *y, t=em.t + grid.dt, background_charge=em.background_charge)


def _worker_count() -> int:
    raw = os.environ.get("NULLGAUGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def compare_evolutions(
    initial: UnitaryState,
    consts: PhysicalConstants,
    t_final: float,
    record_every: int = 1,
) -> ComparisonSeries:
    """Run the direct and potential-only trajectories side by side from one slice.

    Records L2 and Linf distances between the B components at shared times.
    A failure on either path is recorded with its time and cause; the series up
    to that point is returned.
    """
    from .unitary import unitary_step  # local import: unitary imports the closure from here

    grid = initial.grid
    n_steps = max(1, round(t_final / grid.dt))
    unit = initial.copy()
    em = project_em_only(initial, consts)
    series = ComparisonSeries()

    def record():
        d0 = unit.b0 - em.b0
        d1 = unit.b1 - em.b1
        radicand = reconstruction_radicand(em, consts)
        series.t.append(em.t)
        series.l2_b0.append(float(np.sqrt((d0**2).sum() * grid.dx)))
        series.l2_b1.append(float(np.sqrt((d1**2).sum() * grid.dx)))
        series.linf_b0.append(float(np.abs(d0).max()))
        series.linf_b1.append(float(np.abs(d1).max()))
        series.radicand_min.append(float(radicand.min()))
        series.b0_min_abs.append(float(np.abs(em.b0).min()))

    record()
    workers = _worker_count()
    pool = ThreadPoolExecutor(max_workers=2) if workers >= 2 else None
    try:
        for step in range(n_steps):
            try:
                if pool is not None:
                    fut_u = pool.submit(unitary_step, unit, consts)
                    fut_e = pool.submit(em_only_step, em, consts)
                    unit, em = fut_u.result(), fut_e.result()
                else:
                    unit = unitary_step(unit, consts)
                    em = em_only_step(em, consts)
            except Exception as exc:  # either path's breakdown is data, not a crash
                path = "em-only" if isinstance(exc, (NegativeRadicand, VanishingB0, PhiVanishing)) else "unitary"
                if isinstance(exc, NanDetected):
                    path = exc.where.split()[0]
                series.failure = FailureRecord(t=unit.t, path=path, cause=f"{type(exc).__name__}: {exc}")
                raise
            if (step + 1) % record_every == 0:
                record()
    except (NegativeRadicand, VanishingB0, PhiVanishing, NanDetected):
        pass
    finally:
        if pool is not None:
            pool.shutdown()
    return series
