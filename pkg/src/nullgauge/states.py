"""State records: the Cauchy data each evolution module advances.

All states store contravariant components (A^0, A^1 and B^0, B^1); index
lowering is explicit wherever a formula needs it (metric (+,-): X_0 = X^0,
X_1 = -X^1).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import FieldShapeError
from .grid import GridSpec


def _field(f, grid: GridSpec, complex_ok: bool = False) -> np.ndarray:
    arr = np.asarray(f, dtype=complex if complex_ok else float)
    if arr.shape != (grid.n_x,):
        raise FieldShapeError(f"field shape {arr.shape} does not match grid n_x={grid.n_x}")
    if not np.all(np.isfinite(arr.view(float) if complex_ok else arr)):
        raise FieldShapeError("field contains non-finite entries")
    return arr


@dataclass
class ComplexKgmState:
    """Complex scalar psi with 4-potential (A^0, A^1) and first time derivatives."""

    grid: GridSpec
    psi: np.ndarray
    psi_dot: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a0_dot: np.ndarray
    a1_dot: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.psi = _field(self.psi, self.grid, complex_ok=True)
        self.psi_dot = _field(self.psi_dot, self.grid, complex_ok=True)
        for name in ("a0", "a1", "a0_dot", "a1_dot"):
            setattr(self, name, _field(getattr(self, name), self.grid))

    def copy(self) -> "ComplexKgmState":
        return replace(
            self,
            psi=self.psi.copy(), psi_dot=self.psi_dot.copy(),
            a0=self.a0.copy(), a1=self.a1.copy(),
            a0_dot=self.a0_dot.copy(), a1_dot=self.a1_dot.copy(),
        )


@dataclass
class UnitaryState:
    """Real scalar phi with unitary-gauge potential (B^0, B^1) and time derivatives."""

    grid: GridSpec
    phi: np.ndarray
    phi_dot: np.ndarray
    b0: np.ndarray
    b1: np.ndarray
    b0_dot: np.ndarray
    b1_dot: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("phi", "phi_dot", "b0", "b1", "b0_dot", "b1_dot"):
            setattr(self, name, _field(getattr(self, name), self.grid))

    def copy(self) -> "UnitaryState":
        return replace(
            self,
            phi=self.phi.copy(), phi_dot=self.phi_dot.copy(),
            b0=self.b0.copy(), b1=self.b1.copy(),
            b0_dot=self.b0_dot.copy(), b1_dot=self.b1_dot.copy(),
        )


@dataclass
class EmOnlyState:
    """Potential-only Cauchy data: (B^0, B^1) and time derivatives, matter implicit.

    ``background_charge`` is the spatial mean of j^0 on the slice the data was
    projected from.  On a periodic domain the total charge cannot be recovered
    from B alone (integrating the Gauss law over the circle kills it), so it is
    carried explicitly and treated as a uniform neutralizing background.  Zero
    reproduces the whole-line formulas unchanged.
    """

    grid: GridSpec
    b0: np.ndarray
    b1: np.ndarray
    b0_dot: np.ndarray
    b1_dot: np.ndarray
    t: float = 0.0
    background_charge: float = 0.0

    def __post_init__(self):
        for name in ("b0", "b1", "b0_dot", "b1_dot"):
            setattr(self, name, _field(getattr(self, name), self.grid))
        if not np.isfinite(self.background_charge):
            raise FieldShapeError("background_charge must be finite")

    def copy(self) -> "EmOnlyState":
        return replace(
            self,
            b0=self.b0.copy(), b1=self.b1.copy(),
            b0_dot=self.b0_dot.copy(), b1_dot=self.b1_dot.copy(),
        )
