"""Guided-particle trajectories: the charge flow follows the potential direction.

The guidance velocity is j^1/j^0 = B^1/B^0 (the matter factor phi^2 cancels in
the ratio), so particles move along the potential.  The velocity is not a
priori bounded by 1 for the scalar theory; the maximum per slice is recorded,
never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import VanishingB0AtPoint
from .grid import PhysicalConstants
from .states import UnitaryState

#: Interpolated |B0| below this fraction of max|B0| stops a trajectory.
GUIDANCE_B0_FRACTION = 1e-9


@dataclass
class Ensemble:
    """Uniformly weighted tracer particles at periodic positions in [0, L)."""

    positions: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.positions = np.atleast_1d(np.asarray(self.positions, dtype=float))
        if self.positions.size == 0:
            raise ValueError("ensemble must be nonempty")


@dataclass
class AdvectionResult:
    times: np.ndarray
    positions: np.ndarray          # shape (n_times, n_particles); NaN after a stop
    max_velocity: np.ndarray       # per recorded slice
    stopped: list = field(default_factory=list)  # (particle index, time, x, reason)


def _interp_periodic(f: np.ndarray, x, dx: float) -> np.ndarray:
    """Linear interpolation of a periodic site field to arbitrary positions."""
    n = f.size
    xi = np.asarray(x, dtype=float) / dx
    i0 = np.floor(xi).astype(int) % n
    frac = xi - np.floor(xi)
    return f[i0] * (1.0 - frac) + f[(i0 + 1) % n] * frac


def charge_density(state: UnitaryState, consts: PhysicalConstants) -> np.ndarray:
    """Time component of the current, j^0 = -2 e^2 B^0 phi^2."""
    return -2.0 * consts.e**2 * state.b0 * state.phi**2


def guidance_velocity(state: UnitaryState, x, consts: PhysicalConstants):
    """B^1/B^0 interpolated to position(s) x.  Scalar in, scalar out."""
    scalar = np.isscalar(x)
    b0 = _interp_periodic(state.b0, x, state.grid.dx)
    b1 = _interp_periodic(state.b1, x, state.grid.dx)
    floor = GUIDANCE_B0_FRACTION * float(np.abs(state.b0).max())
    bad = np.abs(np.atleast_1d(b0)) <= floor
    if bad.any():
        raise VanishingB0AtPoint(float(np.atleast_1d(x)[bad][0]), t=state.t)
    v = b1 / b0
    return float(v) if scalar else v


def sample_ensemble(state: UnitaryState, consts: PhysicalConstants, n_particles: int, seed: int) -> Ensemble:
    """Stratified inverse-CDF sample of |j^0| on the lattice; deterministic per seed."""
    grid = state.grid
    weights = np.abs(charge_density(state, consts))
    total = weights.sum()
    if total <= 0:
        raise ValueError("charge density vanishes; nothing to sample")
    cdf = np.concatenate([[0.0], np.cumsum(weights / total)])
    cdf[-1] = 1.0
    rng = np.random.default_rng(seed)
    u = (np.arange(n_particles) + rng.random(n_particles)) / n_particles
    idx = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, grid.n_x - 1)
    cell = (u - cdf[idx]) / np.maximum(cdf[idx + 1] - cdf[idx], 1e-300)
    return Ensemble(positions=(idx + cell) * grid.dx, seed=seed)


def advect_ensemble(ensemble: Ensemble, states, consts: PhysicalConstants) -> AdvectionResult:
    """RK4-advect the ensemble through a stored trajectory of field slices.

    ``states`` must be consecutive slices separated by grid.dt.  Midpoint field
    values are linear interpolations of neighbouring slices.  A particle whose
    local B^0 changes sign (electron-like to positron-like flow) is stopped and
    logged rather than pushed through the singular guidance ratio.
    """
    states = list(states)
    if len(states) < 2:
        raise ValueError("need at least two field slices to advect")
    grid = states[0].grid
    dt = grid.dt
    length = grid.length
    pos = ensemble.positions.copy() % length
    alive = np.ones(pos.size, dtype=bool)
    sign0 = np.sign(_interp_periodic(states[0].b0, pos, grid.dx))
    out_pos = [pos.copy()]
    out_v = [float(np.abs(guidance_velocity(states[0], pos, consts)).max())]
    times = [states[0].t]
    stopped = []

    def velocity(sa, sb, w, x):
        b0 = (1 - w) * _interp_periodic(sa.b0, x, grid.dx) + w * _interp_periodic(sb.b0, x, grid.dx)
        b1 = (1 - w) * _interp_periodic(sa.b1, x, grid.dx) + w * _interp_periodic(sb.b1, x, grid.dx)
        return b1 / b0, b0

    for i in range(len(states) - 1):
        sa, sb = states[i], states[i + 1]
        p = pos[alive]
        k1, b0a = velocity(sa, sb, 0.0, p)
        k2, _ = velocity(sa, sb, 0.5, (p + 0.5 * dt * k1) % length)
        k3, _ = velocity(sa, sb, 0.5, (p + 0.5 * dt * k2) % length)
        k4, b0b = velocity(sa, sb, 1.0, (p + dt * k3) % length)
        pos[alive] = (p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)) % length
        # stop particles whose local B0 flipped sign relative to their start
        crossing = np.sign(b0b) != sign0[alive]
        if crossing.any():
            idx_alive = np.flatnonzero(alive)
            for j in idx_alive[crossing]:
                stopped.append((int(j), sb.t, float(pos[j]), "B0 sign change"))
            alive[idx_alive[crossing]] = False
        times.append(sb.t)
        snapshot = pos.copy()
        snapshot[~alive] = np.nan
        out_pos.append(snapshot)
        vmax = float(np.abs(k1).max()) if k1.size else 0.0
        out_v.append(vmax)

    return AdvectionResult(
        times=np.asarray(times),
        positions=np.asarray(out_pos),
        max_velocity=np.asarray(out_v),
        stopped=stopped,
    )


def density_histogram(positions: np.ndarray, grid_length: float, bins: int):
    """Normalized density histogram of final particle positions (NaNs ignored)."""
    good = positions[np.isfinite(positions)]
    counts, edges = np.histogram(good, bins=bins, range=(0.0, grid_length))
    width = grid_length / bins
    return counts / (good.size * width), edges


def field_density_binned(state: UnitaryState, consts: PhysicalConstants, bins: int) -> np.ndarray:
    """|j^0| normalized to unit integral, averaged onto ``bins`` equal cells."""
    dens = np.abs(charge_density(state, consts))
    dens = dens / (dens.sum() * state.grid.dx)
    per = state.grid.n_x // bins
    if per * bins != state.grid.n_x:
        raise ValueError(f"bins={bins} must divide n_x={state.grid.n_x}")
    return dens.reshape(bins, per).mean(axis=1)
