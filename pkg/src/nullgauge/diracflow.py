"""Particles pushed by the Lorentz force in constrained potentials.

For a potential obeying A_mu A^mu = m^2/e^2, a particle started with momentum
p = -e A(x) and pushed by dp^mu/dtau = (e/m) F^{mu nu} p_nu keeps p = -e A
along its path, so the Lorentz orbit coincides with the integral curve of the
potential itself (``flow_line``).  Both integrators are classical RK4 in proper
time.  The shipped constrained family uses the branch with A^0 < 0 so that
p^0 = -e A^0 > 0 (forward in coordinate time for e > 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NanDetected
from .grid import PhysicalConstants


@dataclass
class RelParticle:
    """Worldline sample: position x^mu = (t, x), momentum p^mu, proper time tau."""

    x: np.ndarray
    p: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)

    def copy(self) -> "RelParticle":
        return RelParticle(self.x.copy(), self.p.copy(), self.tau)


class AnalyticPotential:
    """Closed-form 4-potential A^mu(t, x) with closed-form first and second derivatives.

    Subclasses implement a(t, x) -> (A^0, A^1), da(t, x) -> 2x2 matrix
    [d_mu A^nu] with mu the derivative index, and d2a(t, x) -> (A^0'', A^1'')
    (pure spatial; the shipped families are static).
    """

    def a(self, t: float, x: float):
        raise NotImplementedError

    def da(self, t: float, x: float):
        raise NotImplementedError

    def d2a(self, t: float, x: float):
        raise NotImplementedError

    def f01(self, t: float, x: float) -> float:
        """Field strength F^{01} = d_t A^1 + d_x A^0 (the 1+1D electric field)."""
        d = self.da(t, x)
        return d[0][1] + d[1][0]

    def constraint_residual(self, consts: PhysicalConstants, t: float, x: float) -> float:
        """A_mu A^mu - m^2/e^2."""
        a0, a1 = self.a(t, x)
        return a0**2 - a1**2 - consts.k2


class RapidityPotential(AnalyticPotential):
    """Constrained family A = -(m/e) (cosh u, sinh u), u = u0 sin(q x).

    Satisfies A_mu A^mu = m^2/e^2 identically (cosh^2 - sinh^2 = 1).  The
    ``a1_scale`` knob breaks the constraint (scale != 1) for negative controls.
    """

    def __init__(self, consts: PhysicalConstants, u0: float = 0.3, q: float = 1.0, a1_scale: float = 1.0):
        self.c = consts.m / consts.e
        self.u0 = u0
        self.q = q
        self.a1_scale = a1_scale

    def _u(self, x: float):
        return self.u0 * math.sin(self.q * x), self.u0 * self.q * math.cos(self.q * x)

    def a(self, t, x):
        u, _ = self._u(x)
        return (-self.c * math.cosh(u), -self.a1_scale * self.c * math.sinh(u))

    def da(self, t, x):
        u, du = self._u(x)
        return (
            (0.0, 0.0),
            (-self.c * math.sinh(u) * du, -self.a1_scale * self.c * math.cosh(u) * du),
        )

    def d2a(self, t, x):
        u, du = self._u(x)
        ddu = -self.u0 * self.q**2 * math.sin(self.q * x)
        a0xx = -self.c * (math.cosh(u) * du**2 + math.sinh(u) * ddu)
        a1xx = -self.a1_scale * self.c * (math.sinh(u) * du**2 + math.cosh(u) * ddu)
        return (a0xx, a1xx)


class UniformPotential(AnalyticPotential):
    """Constant potential: zero field strength, straight-line motion."""

    def __init__(self, a0: float, a1: float = 0.0):
        self._a = (a0, a1)

    def a(self, t, x):
        return self._a

    def da(self, t, x):
        return ((0.0, 0.0), (0.0, 0.0))

    def d2a(self, t, x):
        return (0.0, 0.0)


def lorentz_push(particle: RelParticle, potential: AnalyticPotential,
                 consts: PhysicalConstants, dtau: float) -> RelParticle:
    """One RK4 proper-time step of dp/dtau = (e/m) F p, dx/dtau = p/m."""
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    e, m = consts.e, consts.m

    def deriv(s):
        t, x, p0, p1 = s
        f01 = potential.f01(t, x)
        # dp^0 = (e/m) F^{01} p_1 = -(e/m) F^{01} p^1 ; dp^1 = (e/m) F^{10} p_0
        return (p0 / m, p1 / m, -(e / m) * f01 * p1, -(e / m) * f01 * p0)

    s = (particle.x[0], particle.x[1], particle.p[0], particle.p[1])
    k1 = deriv(s)
    k2 = deriv(tuple(a + 0.5 * dtau * b for a, b in zip(s, k1)))
    k3 = deriv(tuple(a + 0.5 * dtau * b for a, b in zip(s, k2)))
    k4 = deriv(tuple(a + dtau * b for a, b in zip(s, k3)))
    s1 = tuple(a + dtau / 6.0 * (b + 2 * c + 2 * d + f) for a, b, c, d, f in zip(s, k1, k2, k3, k4))
    if not all(math.isfinite(v) for v in s1):
        raise NanDetected("lorentz_push", particle.tau + dtau)
    return RelParticle(np.array(s1[:2]), np.array(s1[2:]), particle.tau + dtau)


def flow_line(potential: AnalyticPotential, consts: PhysicalConstants,
              x0, dtau: float, n_steps: int) -> np.ndarray:
    """Integral curve of dx^mu/dtau = -e A^mu(x)/m from x0; returns (n_steps+1, 2)."""
    e, m = consts.e, consts.m

    def deriv(s):
        a0, a1 = potential.a(s[0], s[1])
        return (-e * a0 / m, -e * a1 / m)

    path = np.empty((n_steps + 1, 2))
    s = (float(x0[0]), float(x0[1]))
    path[0] = s
    for i in range(n_steps):
        k1 = deriv(s)
        k2 = deriv(tuple(a + 0.5 * dtau * b for a, b in zip(s, k1)))
        k3 = deriv(tuple(a + 0.5 * dtau * b for a, b in zip(s, k2)))
        k4 = deriv(tuple(a + dtau * b for a, b in zip(s, k3)))
        s = tuple(a + dtau / 6.0 * (b + 2 * c + 2 * d + f) for a, b, c, d, f in zip(s, k1, k2, k3, k4))
        if not all(math.isfinite(v) for v in s):
            raise NanDetected("flow_line", (i + 1) * dtau)
        path[i + 1] = s
    return path


@dataclass
class DiracResiduals:
    constraint_max: float          # max |A.A - m^2/e^2|
    dconstraint_max: float         # max |A_nu d^mu A^nu| (differentiated constraint)
    lambda_values: np.ndarray      # multiplier extracted from the time component
    eq_space_residual_max: float   # space component of the constrained-field equation


def dirac_residuals(potential: AnalyticPotential, consts: PhysicalConstants,
                    sample_points) -> DiracResiduals:
    """Pointwise residuals of the constrained-electrodynamics relations on samples.

    The time component of box A_mu - d_mu(div A) = lambda A_mu contains no
    second time derivatives for static potentials and defines lambda; the space
    component's residual is reported (a manufactured constrained potential need
    not satisfy the field equation itself).
    """
    cmax = 0.0
    dmax = 0.0
    emax = 0.0
    lams = []
    for pt in sample_points:
        t, x = (0.0, float(pt)) if np.isscalar(pt) else (float(pt[0]), float(pt[1]))
        a0, a1 = potential.a(t, x)
        d = potential.da(t, x)
        a0xx, a1xx = potential.d2a(t, x)
        cmax = max(cmax, abs(a0**2 - a1**2 - consts.k2))
        # A_nu d^mu A^nu: mu=0 -> A.A time derivative (static: 0); mu=1 spatial
        dc_x = a0 * d[1][0] - a1 * d[1][1]
        dmax = max(dmax, abs(dc_x))
        # static: box A_0 - d_0(div A) = -A0'' ; lambda = -A0''/A0
        lam = -a0xx / a0
        lams.append(lam)
        # space component, lowered index: box A_1 - d_1(div A) = lambda A_1
        # static 1+1D: the left side vanishes identically; residual = -lambda A_1
        emax = max(emax, abs(lam * (-a1)))
    return DiracResiduals(
        constraint_max=cmax,
        dconstraint_max=dmax,
        lambda_values=np.asarray(lams),
        eq_space_residual_max=emax,
    )


def mass_shell_residual(particle: RelParticle, consts: PhysicalConstants) -> float:
    """p_mu p^mu - m^2."""
    return float(particle.p[0] ** 2 - particle.p[1] ** 2 - consts.m**2)


def codirection_residual(particle: RelParticle, potential: AnalyticPotential,
                         consts: PhysicalConstants) -> float:
    """max component of p + e A(x): zero when the momentum rides the potential."""
    a0, a1 = potential.a(particle.x[0], particle.x[1])
    return float(max(abs(particle.p[0] + consts.e * a0), abs(particle.p[1] + consts.e * a1)))
