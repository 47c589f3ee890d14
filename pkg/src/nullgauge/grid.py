"""Uniform periodic 1+1D lattice: geometry, constants, and finite-difference stencils.

Conventions used throughout the package: natural units (hbar = c = 1) and metric
signature (+,-), so for any vector V the lowered components are V_0 = V^0 and
V_1 = -V^1, and V_mu V^mu = (V^0)^2 - (V^1)^2.  The d'Alembertian splits as
box = d_t^2 - d_x^2 with d_x^2 realized by ``laplacian_1d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldShapeError


@dataclass(frozen=True)
class GridSpec:
    """Periodic spatial lattice with n_x sites, spacing dx, and time step dt."""

    n_x: int
    dx: float
    dt: float
    boundary: str = "periodic"

    def __post_init__(self):
        if self.boundary != "periodic":
            raise ValueError(f"only periodic boundaries are supported, got {self.boundary!r}")
        if self.n_x < 8:
            raise ValueError(f"n_x must be >= 8, got {self.n_x}")
        if not (self.dx > 0 and np.isfinite(self.dx)):
            raise ValueError(f"dx must be a positive real, got {self.dx}")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError(f"dt must be a positive real, got {self.dt}")
        if self.dt / self.dx > 0.5:
            raise ValueError(
                f"time step violates the CFL guard dt/dx <= 0.5: dt/dx = {self.dt / self.dx:.3g}"
            )

    @property
    def length(self) -> float:
        return self.n_x * self.dx

    @property
    def x(self) -> np.ndarray:
        """Site coordinates, x_i = i*dx."""
        return np.arange(self.n_x) * self.dx

    def refined(self, factor: int = 2) -> "GridSpec":
        """Same domain with dx and dt divided by ``factor``."""
        return GridSpec(self.n_x * factor, self.dx / factor, self.dt / factor, self.boundary)


@dataclass(frozen=True)
class PhysicalConstants:
    """Charge e and mass m.  The constraint constant k^2 = m^2/e^2 is derived, not free."""

    e: float
    m: float

    def __post_init__(self):
        if self.e == 0 or not np.isfinite(self.e):
            raise ValueError("charge e must be nonzero and finite")
        if not (self.m > 0 and np.isfinite(self.m)):
            raise ValueError("mass m must be positive and finite")

    @property
    def k2(self) -> float:
        return self.m**2 / self.e**2


def _check_field(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    f = np.asarray(f)
    if f.shape != (grid.n_x,):
        raise FieldShapeError(f"field shape {f.shape} does not match grid n_x={grid.n_x}")
    return f


def spatial_derivative(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Second-order central first derivative with periodic wraparound."""
    f = _check_field(f, grid)
    return (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * grid.dx)


def laplacian_1d(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Standard 3-point second derivative with periodic wraparound."""
    f = _check_field(f, grid)
    return (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / grid.dx**2


def spectral_antiderivative(f: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Zero-mean w with spatial_derivative(w) == f - mean(f) at machine precision.

    Inverts the central-difference symbol i*sin(k dx)/dx mode by mode.  The
    symbol vanishes for the mean and (on even grids) the Nyquist mode; both are
    dropped, which is exact for smooth, mean-free f.
    """
    f = _check_field(f, grid)
    n = grid.n_x
    fk = np.fft.rfft(f - f.mean())
    k = np.arange(fk.size)
    sym = 1j * np.sin(2.0 * np.pi * k / n) / grid.dx
    sym[0] = 1.0
    wk = fk / sym
    wk[0] = 0.0
    if n % 2 == 0:
        wk[-1] = 0.0
    return np.fft.irfft(wk, n)
