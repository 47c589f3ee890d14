"""Majorana spinor algebra: representations, bilinears, and pointwise identities.

Metric (+,-,-,-).  Charge conjugation is psi_c = U psi* with U the (unitary)
matrix satisfying U (gamma^mu)* U^{-1} = -gamma^mu; the Majorana condition is
psi_c = psi.  In the Majorana representation all gamma matrices are purely
imaginary and U is the identity, so the condition reduces to reality.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import AxialCurrentNonzero, DegeneratePhase, DegenerateSpinor

_METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)


def _blk(a, b, c, d):
    return np.block([[a, b], [c, d]])


@dataclass(frozen=True)
class GammaSet:
    """Four gamma matrices, gamma5, and the charge-conjugation matrix for one representation."""

    gammas: np.ndarray           # shape (4, 4, 4)
    gamma5: np.ndarray
    conjugation: np.ndarray      # U with psi_c = U psi*
    representation: str

    def slash(self, a: np.ndarray) -> np.ndarray:
        """gamma^mu a_mu for a given with contravariant components a^mu."""
        a = np.asarray(a, dtype=float)
        return sum(_METRIC[mu, mu] * a[mu] * self.gammas[mu] for mu in range(4))


def dirac_representation() -> GammaSet:
    g = np.stack([
        _blk(_I2, _Z2, _Z2, -_I2),
        _blk(_Z2, _S1, -_S1, _Z2),
        _blk(_Z2, _S2, -_S2, _Z2),
        _blk(_Z2, _S3, -_S3, _Z2),
    ])
    g5 = 1j * g[0] @ g[1] @ g[2] @ g[3]
    return GammaSet(g, g5, 1j * g[2], "dirac")


def majorana_representation() -> GammaSet:
    g = np.stack([
        _blk(_Z2, _S2, _S2, _Z2),
        _blk(1j * _S3, _Z2, _Z2, 1j * _S3),
        _blk(_Z2, -_S2, _S2, _Z2),
        _blk(-1j * _S1, _Z2, _Z2, -1j * _S1),
    ])
    g5 = 1j * g[0] @ g[1] @ g[2] @ g[3]
    return GammaSet(g, g5, np.eye(4, dtype=complex), "majorana")


def clifford_residual(gs: GammaSet) -> float:
    """max |{gamma^mu, gamma^nu} - 2 g^{mu nu}|; zero for a valid set."""
    worst = 0.0
    for mu, nu in product(range(4), repeat=2):
        r = gs.gammas[mu] @ gs.gammas[nu] + gs.gammas[nu] @ gs.gammas[mu] - 2.0 * _METRIC[mu, nu] * np.eye(4)
        worst = max(worst, float(np.abs(r).max()))
    return worst


def representation_intertwiner(src: GammaSet, dst: GammaSet) -> np.ndarray:
    """Unitary S with dst.gammas[mu] = S src.gammas[mu] S^dagger for all mu.

    Found as the one-dimensional common nullspace of the vectorized similarity
    equations (unique up to phase for irreducible representations); the phase
    is fixed so that charge conjugation commutes with the basis change, making
    S map Majorana spinors to Majorana spinors.
    """
    rows = []
    for mu in range(4):
        rows.append(np.kron(np.eye(4), dst.gammas[mu]) - np.kron(src.gammas[mu].T, np.eye(4)))
    m = np.vstack(rows)
    _, sv, vh = np.linalg.svd(m)
    s = vh[-1].reshape(4, 4)
    u, _, wh = np.linalg.svd(s)
    s = u @ wh  # unitarize (the nullspace vector is proportional to a unitary)
    # phase alignment: S U_src conj(S)^{-1} equals U_dst up to e^{2 i alpha}
    m_conj = s @ src.conjugation @ np.linalg.inv(np.conj(s))
    c = np.trace(m_conj @ np.linalg.inv(dst.conjugation)) / 4.0
    return np.exp(-1j * np.angle(c) / 2.0) * s


def charge_conjugate(psi: np.ndarray, gs: GammaSet) -> np.ndarray:
    return gs.conjugation @ np.conj(np.asarray(psi, dtype=complex))


def is_majorana(psi: np.ndarray, gs: GammaSet, tol: float = 1e-12) -> bool:
    psi = np.asarray(psi, dtype=complex)
    scale = float(np.abs(psi).max()) or 1.0
    return float(np.abs(charge_conjugate(psi, gs) - psi).max()) <= tol * scale


def random_majorana(gs: GammaSet, rng: np.random.Generator) -> np.ndarray:
    """psi = z + z_c is Majorana for any z; z drawn complex normal."""
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    return z + charge_conjugate(z, gs)


def _bilinear(psi: np.ndarray, gs: GammaSet, mat: np.ndarray) -> complex:
    return complex(np.conj(psi) @ (gs.gammas[0].conj().T @ mat) @ psi)


def dirac_current(psi: np.ndarray, gs: GammaSet, e: float = 1.0) -> np.ndarray:
    """j^mu = e * psibar gamma^mu psi (real for any psi; asserted)."""
    psi = np.asarray(psi, dtype=complex)
    vals = np.array([_bilinear(psi, gs, gs.gammas[mu]) for mu in range(4)])
    scale = float(np.abs(vals).max()) or 1.0
    assert float(np.abs(vals.imag).max()) <= 1e-12 * scale, "current bilinear must be real"
    return e * vals.real


def axial_current(psi: np.ndarray, gs: GammaSet) -> np.ndarray:
    """a^mu = psibar gamma5 gamma^mu psi (real; vanishes identically on Majorana spinors)."""
    psi = np.asarray(psi, dtype=complex)
    vals = np.array([_bilinear(psi, gs, gs.gamma5 @ gs.gammas[mu]) for mu in range(4)])
    scale = max(float(np.abs(vals).max()), float(np.abs(psi).max()) ** 2) or 1.0
    assert float(np.abs(vals.imag).max()) <= 1e-12 * scale, "axial bilinear must be real"
    return vals.real


def minkowski_square(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    return float(a[0] ** 2 - a[1] ** 2 - a[2] ** 2 - a[3] ** 2)


def slash_nullspace(psi: np.ndarray, gs: GammaSet, sv_threshold: float = 1e-8):
    """Real 4-vectors A with slash(A) psi = 0, via SVD of the real-linear system.

    Returns (basis, singular_values); basis rows are orthonormal null directions.
    Raises DegenerateSpinor when singular values sit inside the threshold band
    (rank decision ambiguous) and ValueError on a zero spinor.
    """
    psi = np.asarray(psi, dtype=complex)
    if float(np.abs(psi).max()) == 0.0:
        raise ValueError("slash_nullspace requires a nonzero spinor")
    cols = [_METRIC[mu, mu] * (gs.gammas[mu] @ psi) for mu in range(4)]
    m = np.stack(cols, axis=1)
    mr = np.vstack([m.real, m.imag])
    _, sv, vh = np.linalg.svd(mr)
    cut = sv_threshold * sv[0]
    band = (sv > 0.1 * cut) & (sv < 10.0 * cut)
    if band.any():
        raise DegenerateSpinor(f"singular values {sv[band]} inside the decision band around {cut:.3e}")
    null_rows = vh[sv <= cut]
    return [row for row in null_rows], sv


def proportionality_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Scaled antisymmetric cross check: 0 iff a and b are parallel."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    denom = (np.linalg.norm(a) * np.linalg.norm(b)) or 1.0
    return float(np.abs(np.outer(a, b) - np.outer(b, a)).max() / denom)


def least_squares_ratio(a: np.ndarray, b: np.ndarray) -> float:
    """lambda minimizing ||b - lambda a||."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return float(a @ b / (a @ a))


def phase_factorization(psi: np.ndarray, gs: GammaSet, axial_tol: float = 1e-10):
    """Split psi = exp(i theta) Phi with Phi Majorana and theta in [0, pi).

    Valid exactly when the axial current vanishes; enforced as a precondition.
    The factorization solves psi_c = exp(-2 i theta) psi; when the Majorana and
    anti-Majorana parts of psi balance the ratio is not unimodular and the
    phase is reported as degenerate.
    """
    psi = np.asarray(psi, dtype=complex)
    norm2 = float(np.real(np.conj(psi) @ psi))
    if norm2 == 0.0:
        raise ValueError("phase_factorization requires a nonzero spinor")
    ax = axial_current(psi, gs)
    if float(np.abs(ax).max()) > axial_tol * norm2:
        raise AxialCurrentNonzero(float(np.abs(ax).max()), axial_tol * norm2)
    psic = charge_conjugate(psi, gs)
    z = complex(np.conj(psi) @ psic) / norm2
    if abs(abs(z) - 1.0) > 1e-8:
        raise DegeneratePhase(f"|psi^dag psi_c|/|psi|^2 = {abs(z):.6f}, not unimodular")
    theta = (-np.angle(z) / 2.0) % np.pi
    phi = np.exp(-1j * theta) * psi
    # land on the Majorana branch: theta and theta+pi give phi and -phi
    if float(np.abs(charge_conjugate(phi, gs) - phi).max()) > 1e-8 * np.sqrt(norm2):
        raise DegeneratePhase("factor does not satisfy the Majorana condition")
    return float(theta), phi


# ---------------------------------------------------------------------------
# polynomial test fields for the slashed-derivative identity
# ---------------------------------------------------------------------------

class Poly4:
    """Multivariate polynomial in (t, x, y, z) with complex coefficients.

    Minimal support for building exact-derivative test fields: evaluation,
    partial derivatives, sums, and products.
    """

    def __init__(self, coeffs: dict | None = None):
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v != 0}

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int = 3, real: bool = False) -> "Poly4":
        coeffs = {}
        for powers in product(range(degree + 1), repeat=4):
            if sum(powers) <= degree:
                c = rng.normal()
                if not real:
                    c = c + 1j * rng.normal()
                coeffs[powers] = c
        return cls(coeffs)

    def __call__(self, point) -> complex:
        t, x, y, z = point
        total = 0.0 + 0.0j
        for (i, j, k, l), c in self.coeffs.items():
            total += c * t**i * x**j * y**k * z**l
        return total

    def deriv(self, axis: int) -> "Poly4":
        out = {}
        for powers, c in self.coeffs.items():
            n = powers[axis]
            if n:
                p = list(powers)
                p[axis] = n - 1
                key = tuple(p)
                out[key] = out.get(key, 0) + c * n
        return Poly4(out)

    def __mul__(self, other: "Poly4") -> "Poly4":
        out = {}
        for pa, ca in self.coeffs.items():
            for pb, cb in other.coeffs.items():
                key = tuple(a + b for a, b in zip(pa, pb))
                out[key] = out.get(key, 0) + ca * cb
        return Poly4(out)

    def __add__(self, other: "Poly4") -> "Poly4":
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, 0) + c
        return Poly4(out)


class SlashedDerivativeIdentity:
    """Pointwise check of (dslash Aslash + Aslash dslash) psi
    = 2 A^mu d_mu psi + (d_mu A_nu) gamma^mu gamma^nu psi.

    psi_polys: 4 Poly4 spinor components; a_polys: 4 Poly4 contravariant
    potential components (real coefficients).  All derivatives are exact
    polynomial derivatives, so the residual is zero to roundoff for any fields.
    The product polynomial Aslash psi is precomputed once per field pair.
    """

    def __init__(self, psi_polys, a_polys, gs: GammaSet):
        self.psi = list(psi_polys)
        self.a = list(a_polys)
        self.gs = gs
        aslash_psi = []
        for comp in range(4):
            acc = Poly4()
            for mu in range(4):
                for col in range(4):
                    g = _METRIC[mu, mu] * gs.gammas[mu][comp, col]
                    if g != 0:
                        acc = acc + Poly4({(0, 0, 0, 0): g}) * (self.a[mu] * self.psi[col])
            aslash_psi.append(acc)
        self._aslash_psi = aslash_psi
        self._dpsi = [[p.deriv(mu) for p in self.psi] for mu in range(4)]
        self._da = [[self.a[nu].deriv(mu) for nu in range(4)] for mu in range(4)]
        self._d_aslash_psi = [[p.deriv(mu) for p in aslash_psi] for mu in range(4)]

    def residual(self, point, flip_gradient_term: bool = False) -> float:
        """Scaled |left - right| at one probe point; flip negates the gradient
        term as a mutation control."""
        gs = self.gs
        point = tuple(float(v) for v in point)
        psi_val = np.array([p(point) for p in self.psi])
        a_val = np.array([p(point).real for p in self.a])
        dpsi = np.array([[p(point) for p in row] for row in self._dpsi])
        da = np.array([[p(point).real for p in row] for row in self._da])
        d_ap = np.array([[p(point) for p in row] for row in self._d_aslash_psi])

        aslash = gs.slash(a_val)
        left = np.zeros(4, dtype=complex)
        for mu in range(4):
            left += gs.gammas[mu] @ d_ap[mu]          # dslash acting on (Aslash psi)
            left += aslash @ (gs.gammas[mu] @ dpsi[mu])

        right = 2.0 * sum(a_val[mu] * dpsi[mu] for mu in range(4))  # A^mu d_mu: direct contraction
        grad = np.zeros(4, dtype=complex)
        for mu in range(4):
            for nu in range(4):
                a_nu_dmu = _METRIC[nu, nu] * da[mu, nu]  # d_mu A_nu from contravariant input
                grad += a_nu_dmu * (gs.gammas[mu] @ gs.gammas[nu] @ psi_val)
        right = right + (-grad if flip_gradient_term else grad)

        scale = max(float(np.abs(left).max()), float(np.abs(right).max()), 1.0)
        return float(np.abs(left - right).max() / scale)
