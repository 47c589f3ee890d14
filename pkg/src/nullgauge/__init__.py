"""nullgauge: lattice scalar electrodynamics in the unitary gauge.

Evolves the complex charged scalar coupled to the electromagnetic potential on
a periodic 1+1D lattice, transforms solutions to the unitary gauge (real
field), reconstructs the matter field from potential-only Cauchy data and
evolves the potential alone, integrates guided-particle trajectories, and
verifies pointwise Majorana spinor identities.
"""

__version__ = "0.1.0"

from .grid import GridSpec, PhysicalConstants, laplacian_1d, spatial_derivative
from .states import ComplexKgmState, EmOnlyState, UnitaryState

__all__ = [
    "GridSpec",
    "PhysicalConstants",
    "ComplexKgmState",
    "UnitaryState",
    "EmOnlyState",
    "spatial_derivative",
    "laplacian_1d",
    "__version__",
]
