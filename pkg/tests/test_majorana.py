import numpy as np
import pytest

from _oracles import brute_force_null_ray_dimension
from nullgauge import majorana
from nullgauge.errors import AxialCurrentNonzero
from nullgauge.majorana import (
    GammaSet,
    Poly4,
    SlashedDerivativeIdentity,
    axial_current,
    charge_conjugate,
    clifford_residual,
    dirac_representation,
    dirac_current,
    is_majorana,
    least_squares_ratio,
    majorana_representation,
    minkowski_square,
    phase_factorization,
    proportionality_residual,
    random_majorana,
    representation_intertwiner,
    slash_nullspace,
)

REPS = [dirac_representation(), majorana_representation()]


@pytest.fixture(params=REPS, ids=[g.representation for g in REPS])
def gamma_set(request) -> GammaSet:
    return request.param


class TestRepresentations:
    def test_clifford_relations(self, gamma_set):
        assert clifford_residual(gamma_set) == 0.0

    def test_gamma5(self, gamma_set):
        g5 = gamma_set.gamma5
        assert np.abs(g5 @ g5 - np.eye(4)).max() <= 1e-14
        for mu in range(4):
            assert np.abs(g5 @ gamma_set.gammas[mu] + gamma_set.gammas[mu] @ g5).max() <= 1e-14

    def test_majorana_rep_is_purely_imaginary(self):
        gs = majorana_representation()
        assert np.abs(gs.gammas.real).max() == 0.0

    def test_conjugation_defining_property(self, gamma_set):
        u = gamma_set.conjugation
        for mu in range(4):
            lhs = u @ np.conj(gamma_set.gammas[mu]) @ np.linalg.inv(u)
            assert np.abs(lhs + gamma_set.gammas[mu]).max() <= 1e-14


class TestChargeConjugation:
    def test_real_spinor_fixed_in_majorana_rep(self):
        gs = majorana_representation()
        psi = np.array([0.3, -1.2, 0.8, 2.0], dtype=complex)
        assert np.abs(charge_conjugate(psi, gs) - psi).max() == 0.0

    def test_involution(self, gamma_set, rng):
        for _ in range(100):
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            twice = charge_conjugate(charge_conjugate(psi, gamma_set), gamma_set)
            assert np.abs(twice - psi).max() <= 1e-14

    def test_basis_change_roundtrip_preserves_condition(self, rng):
        gd, gm = dirac_representation(), majorana_representation()
        s = representation_intertwiner(gd, gm)
        # verify the intertwiner before using it
        for mu in range(4):
            assert np.abs(s @ gd.gammas[mu] @ s.conj().T - gm.gammas[mu]).max() <= 1e-12
        for _ in range(20):
            psi_d = random_majorana(gd, rng)
            psi_m = s @ psi_d
            assert is_majorana(psi_m, gm, tol=1e-10)
            back = s.conj().T @ psi_m
            assert np.abs(back - psi_d).max() <= 1e-12


class TestCurrents:
    def test_zero_spinor(self, gamma_set):
        zero = np.zeros(4, complex)
        assert np.abs(dirac_current(zero, gamma_set)).max() == 0.0
        assert np.abs(axial_current(zero, gamma_set)).max() == 0.0

    def test_majorana_current_is_null(self, gamma_set, rng):
        worst = 0.0
        for _ in range(1000):
            psi = random_majorana(gamma_set, rng)
            j = dirac_current(psi, gamma_set)
            worst = max(worst, abs(minkowski_square(j)) / j[0] ** 2)
        assert worst <= 1e-12

    def test_majorana_current_vanishes_only_at_zero(self, gamma_set, rng):
        # j^0 = psi^dag psi: strictly positive for nonzero c-number spinors
        for _ in range(200):
            psi = random_majorana(gamma_set, rng)
            j = dirac_current(psi, gamma_set)
            n2 = float(np.real(np.conj(psi) @ psi))
            assert j[0] > 0
            assert j[0] == pytest.approx(n2, rel=1e-12)

    def test_axial_current_vanishes_on_majorana(self, gamma_set, rng):
        # identically zero for c-number Majorana spinors (reality kills the bilinear)
        worst = 0.0
        for _ in range(1000):
            psi = random_majorana(gamma_set, rng)
            n2 = float(np.real(np.conj(psi) @ psi))
            worst = max(worst, np.abs(axial_current(psi, gamma_set)).max() / n2)
        assert worst <= 1e-12

    def test_axial_current_nonzero_for_generic_spinors(self, gamma_set, rng):
        # the vanishing axial current is a constraint on general spinors,
        # not an identity
        hits = 0
        for _ in range(100):
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            n2 = float(np.real(np.conj(psi) @ psi))
            if np.abs(axial_current(psi, gamma_set)).max() > 1e-3 * n2:
                hits += 1
        assert hits >= 95

    def test_current_charge_factor(self, gamma_set, rng):
        psi = random_majorana(gamma_set, rng)
        assert np.array_equal(dirac_current(psi, gamma_set, e=2.0),
                              2.0 * dirac_current(psi, gamma_set, e=1.0))


class TestSlashNullspace:
    def test_zero_spinor_rejected(self, gamma_set):
        with pytest.raises(ValueError):
            slash_nullspace(np.zeros(4, complex), gamma_set)

    def test_nullspace_is_null_and_parallel_to_current(self, gamma_set, rng):
        for _ in range(300):
            psi = random_majorana(gamma_set, rng)
            j = dirac_current(psi, gamma_set)
            basis, sv = slash_nullspace(psi, gamma_set)
            assert len(basis) == 1
            a = basis[0]
            assert abs(minkowski_square(a)) <= 1e-10 * float(a @ a)
            assert proportionality_residual(a, j) <= 1e-10
            # slash(a) annihilates the spinor
            assert np.abs(gamma_set.slash(a) @ psi).max() <= 1e-10 * np.abs(psi).max()

    def test_generic_spinor_has_empty_nullspace(self, gamma_set, rng):
        empty = 0
        for _ in range(50):
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            basis, _ = slash_nullspace(psi, gamma_set)
            empty += not basis
        assert empty >= 48

    def test_least_squares_ratio(self, gamma_set, rng):
        psi = random_majorana(gamma_set, rng)
        j = dirac_current(psi, gamma_set)
        (a,), _ = slash_nullspace(psi, gamma_set)
        lam = least_squares_ratio(a, j)
        assert np.abs(j - lam * a).max() <= 1e-9 * np.abs(j).max()


class TestBruteForceOracle:
    def test_dimension_agrees_with_svd(self, gamma_set, rng):
        for _ in range(20):
            psi = random_majorana(gamma_set, rng)
            basis, _ = slash_nullspace(psi, gamma_set)
            dim = brute_force_null_ray_dimension(psi, gamma_set)
            assert dim == len(basis) == 1

    def test_generic_spinor_scan_finds_nothing(self, gamma_set, rng):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        basis, _ = slash_nullspace(psi, gamma_set)
        assert len(basis) == 0
        assert brute_force_null_ray_dimension(psi, gamma_set) == 0


class TestSlashedDerivativeIdentity:
    def test_constant_fields(self, gamma_set):
        const = lambda v: Poly4({(0, 0, 0, 0): v})
        ident = SlashedDerivativeIdentity(
            [const(1.0), const(-0.5), const(2.0), const(0.3)],
            [const(0.7), const(0.1), const(-0.4), const(1.1)],
            gamma_set,
        )
        assert ident.residual((0.2, -1.0, 0.5, 2.0)) <= 1e-14

    def test_random_cubic_fields(self, gamma_set, rng):
        psi_polys = [Poly4.random(rng, degree=3) for _ in range(4)]
        a_polys = [Poly4.random(rng, degree=3, real=True) for _ in range(4)]
        ident = SlashedDerivativeIdentity(psi_polys, a_polys, gamma_set)
        worst = 0.0
        for _ in range(100):
            point = rng.uniform(-1, 1, size=4)
            worst = max(worst, ident.residual(point))
        assert worst <= 1e-10

    def test_sign_mutation_detected(self, gamma_set, rng):
        psi_polys = [Poly4.random(rng, degree=3) for _ in range(4)]
        a_polys = [Poly4.random(rng, degree=3, real=True) for _ in range(4)]
        ident = SlashedDerivativeIdentity(psi_polys, a_polys, gamma_set)
        worst = 0.0
        for _ in range(20):
            point = rng.uniform(-1, 1, size=4)
            worst = max(worst, ident.residual(point, flip_gradient_term=True))
        assert worst > 1e-2


class TestPhaseFactorization:
    def test_majorana_input_gives_zero_phase(self, gamma_set, rng):
        phi0 = random_majorana(gamma_set, rng)
        theta, phi = phase_factorization(phi0, gamma_set)
        assert theta == pytest.approx(0.0, abs=1e-12)
        assert np.abs(phi - phi0).max() <= 1e-12

    def test_recovers_constructed_phase(self, gamma_set, rng):
        for _ in range(200):
            phi0 = random_majorana(gamma_set, rng)
            alpha = rng.uniform(0.01, np.pi - 0.01)
            psi = np.exp(1j * alpha) * phi0
            theta, phi = phase_factorization(psi, gamma_set)
            assert theta == pytest.approx(alpha, abs=1e-10)
            norm = np.abs(psi).max()
            assert np.abs(psi - np.exp(1j * theta) * phi).max() <= 1e-10 * norm
            assert is_majorana(phi, gamma_set, tol=1e-10)

    def test_phase_shift_moves_theta_mod_pi(self, gamma_set, rng):
        phi0 = random_majorana(gamma_set, rng)
        t1, f1 = phase_factorization(np.exp(0.4j) * phi0, gamma_set)
        t2, f2 = phase_factorization(np.exp(1j 	* (0.4 + np.pi)) * phi0, gamma_set)
        assert t1 == pytest.approx(0.4, abs=1e-12)
        assert t2 == pytest.approx(0.4, abs=1e-12)  # theta defined mod pi
        assert np.abs(f1 + f2).max() <= 1e-12       # the factor flips sign

    def test_rejects_nonzero_axial_current(self, gamma_set, rng):
        rejected = 0
        for _ in range(50):
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            n2 = float(np.real(np.conj(psi) @ psi))
            if np.abs(axial_current(psi, gamma_set)).max() <= 1e-10 * n2:
                continue  # astronomically unlikely
            with pytest.raises(AxialCurrentNonzero):
                phase_factorization(psi, gamma_set)
            rejected += 1
        assert rejected >= 45
