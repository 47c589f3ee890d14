"""Exception types shared across the simulation modules."""

from __future__ import annotations


class SimulationError(Exception):
    """Base class for all nullgauge errors."""


class FieldShapeError(SimulationError):
    """A field array does not match the grid it is used with."""


class NodeError(SimulationError):
    """The charged field has (near-)zeros on the slice; the phase is undefined there."""

    def __init__(self, sites, threshold):
        self.sites = list(sites)
        self.threshold = threshold
        super().__init__(
            f"field modulus below {threshold:.3e} at {len(self.sites)} site(s): "
            f"{self.sites[:8]}{'...' if len(self.sites) > 8 else ''}"
        )


class WindingError(SimulationError):
    """The field phase winds around the periodic domain; no single-branch gauge exists."""

    def __init__(self, winding):
        self.winding = winding
        super().__init__(f"phase winding number {winding} over the periodic domain")


class VanishingB0(SimulationError):
    """|B0| fell below the floor at some sites; the reconstruction divides by B0."""

    def __init__(self, sites, floor, t=None):
        self.sites = list(sites)
        self.floor = floor
        self.t = t
        at = f" at t={t:.6g}" if t is not None else ""
        super().__init__(
            f"|B0| < {floor:.3e} at {len(self.sites)} site(s){at}: {self.sites[:8]}"
        )


class NegativeRadicand(SimulationError):
    """The reconstruction radicand is negative beyond tolerance; no real field matches."""

    def __init__(self, min_value, tolerance, sites, t=None):
        self.min_value = min_value
        self.tolerance = tolerance
        self.sites = list(sites)
        self.t = t
        at = f" at t={t:.6g}" if t is not None else ""
        super().__init__(
            f"radicand min {min_value:.3e} below -{tolerance:.3e}{at} "
            f"at {len(self.sites)} site(s): {self.sites[:8]}"
        )


class PhiVanishing(SimulationError):
    """The reconstructed field is (partially) zero; the acceleration closure divides by it."""

    def __init__(self, sites, t=None):
        self.sites = list(sites)
        self.t = t
        at = f" at t={t:.6g}" if t is not None else ""
        super().__init__(f"reconstructed field vanishes at {len(self.sites)} site(s){at}")


class NanDetected(SimulationError):
    """Non-finite values appeared during stepping."""

    def __init__(self, where, t):
        self.where = where
        self.t = t
        super().__init__(f"non-finite values in {where} at t={t:.6g}")


class VanishingB0AtPoint(SimulationError):
    """Guidance velocity undefined: interpolated B0 vanishes at the particle position."""

    def __init__(self, x, t=None):
        self.x = x
        self.t = t
        at = f" at t={t:.6g}" if t is not None else ""
        super().__init__(f"interpolated B0 ~ 0 at x={x:.6g}{at}")


class DegenerateSpinor(SimulationError):
    """Singular values cluster at the rank threshold; the nullspace dimension is ambiguous."""


class AxialCurrentNonzero(SimulationError):
    """Phase factorization requires a vanishing axial current."""

    def __init__(self, norm, tol):
        self.norm = norm
        self.tol = tol
        super().__init__(f"axial current norm {norm:.3e} exceeds tolerance {tol:.3e}")


class DegeneratePhase(SimulationError):
    """The spinor's Majorana and anti-Majorana parts balance; the phase is ill-conditioned."""


class ConfigError(SimulationError):
    """Configuration text failed to parse or validate."""

    def __init__(self, problems):
        # problems: list of (line_number_or_None, message)
        self.problems = list(problems)
        lines = "; ".join(
            f"line {ln}: {msg}" if ln is not None else msg for ln, msg in self.problems
        )
        super().__init__(lines)
