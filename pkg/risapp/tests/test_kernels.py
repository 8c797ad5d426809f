import numpy as np
import scipy.linalg as la
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from risapp.exceptions import (
    DimensionError, NonFiniteError, NotSkewHermitianError, SingularMatrixError,
)
from risapp.kernels import (
    assemble_blocks, block_spectral_factor, enforce_unitary, expm_skew, expm_skew_via_eigen,
    extract_blocks, haar_random_unitary, reunitarize, unitarity_report,
)


def random_skew(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a - a.conj().T)


class ExpmSkewTests(SimpleTestCase):

    def test_zero_step_and_zero_matrix_give_identity(self):
        s = random_skew(5, 1)
        assert_allclose(expm_skew(s, 0.0), np.eye(5), atol=0)
        assert_allclose(expm_skew(np.zeros((3, 3)), 1.0), np.eye(3), atol=1e-15)

    def test_real_rotation_generator(self):
        s = np.array([[0.0, 1.0], [-1.0, 0.0]])
        mu = 0.7
        expected = np.array([[np.cos(mu), np.sin(mu)], [-np.sin(mu), np.cos(mu)]])
        assert_allclose(expm_skew(s, mu), expected, atol=1e-12)
        assert_allclose(expm_skew(s, mu, method='pade'), expected, atol=1e-12)

    def test_spectral_matches_pade_and_is_unitary(self):
        s = random_skew(8, 7)
        r = expm_skew(s, 0.35)
        assert_allclose(r, la.expm(0.35 * s), atol=1e-12)
        self.assertLessEqual(unitarity_report(r).frobenius_drift, 1e-12)

    def test_one_factorization_serves_every_step(self):
        s = random_skew(6, 3)
        factor = expm_skew_via_eigen(s)
        assert_allclose(factor.reconstruct(), s, atol=1e-12)
        assert_allclose(factor.expm(0.5) @ factor.expm(0.25), factor.expm(0.75), atol=1e-12)

    def test_semigroup_law(self):
        s = random_skew(6, 11)
        mu = 0.45
        half = expm_skew(s, mu)
        assert_allclose(expm_skew(s, 2 * mu), half @ half, atol=1e-10)

    def test_scalar_half_turn(self):
        assert_allclose(expm_skew(np.array([[1j * np.pi]]), 1.0), [[-1.0]], atol=1e-15)

    def test_eigenvalues_are_imaginary(self):
        factor = expm_skew_via_eigen(np.diag([1j, -1j]))
        assert_allclose(factor.eigenvalues.real, 0.0, atol=0)
        assert_allclose(np.sort(factor.eigenvalues.imag), [-1.0, 1.0], atol=1e-15)

    def test_rejects_bad_input(self):
        with self.assertRaises(NotSkewHermitianError):
            expm_skew(np.eye(3), 1.0)
        with self.assertRaises(NonFiniteError):
            expm_skew(np.array([[0.0, np.nan], [np.nan, 0.0]]), 1.0)
        with self.assertRaises(DimensionError):
            expm_skew(np.zeros((2, 3)), 1.0)
        with self.assertRaises(NonFiniteError):
            expm_skew(random_skew(2, 0), np.inf)


class HaarTests(SimpleTestCase):

    def test_unitary_and_reproducible(self):
        u = haar_random_unitary(16, 42)
        self.assertLessEqual(unitarity_report(u).frobenius_drift, 1e-12)
        np.testing.assert_array_equal(u, haar_random_unitary(16, 42))
        self.assertFalse(np.allclose(u, haar_random_unitary(16, 43)))

    def test_second_moment_of_an_entry(self):
        rng = np.random.default_rng(2024)
        samples = [abs(haar_random_unitary(4, rng)[0, 0]) ** 2 for _ in range(10_000)]
        self.assertAlmostEqual(float(np.mean(samples)), 0.25, delta=0.02)

    def test_empty_size_rejected(self):
        with self.assertRaises(DimensionError):
            haar_random_unitary(0, 1)


class ReunitarizeTests(SimpleTestCase):

    def test_polar_factor_restores_unitarity(self):
        u = haar_random_unitary(6, 5)
        drifted = u + 1e-6 * np.random.default_rng(0).standard_normal((6, 6))
        fixed = reunitarize(drifted)
        self.assertLessEqual(unitarity_report(fixed).frobenius_drift, 1e-12)
        assert_allclose(fixed, u, atol=1e-5)

    def test_small_perturbation_lands_next_to_the_original(self):
        u = haar_random_unitary(5, 8)
        rng = np.random.default_rng(1)
        e = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        e *= 1e-8 / np.linalg.norm(e)
        self.assertLessEqual(np.linalg.norm(reunitarize(u + e) - u), 2e-8)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        once = reunitarize(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        self.assertLessEqual(np.linalg.norm(reunitarize(once) - once), 1e-11)

    def test_drift_of_a_scaled_identity(self):
        report = unitarity_report(2 * np.eye(2))
        self.assertAlmostEqual(report.frobenius_drift, 3 * np.sqrt(2), places=12)
        self.assertEqual(report.max_entry_drift, 3.0)

    def test_singular_matrix_rejected(self):
        with self.assertRaises(SingularMatrixError):
            reunitarize(np.diag([1.0, 0.0]))

    def test_enforce_leaves_clean_matrix_alone(self):
        u = haar_random_unitary(4, 9)
        same, fixed = enforce_unitary(u)
        self.assertFalse(fixed)
        self.assertIs(same, u)

    def test_enforce_by_blocks_keeps_zero_pattern(self):
        blocks = [haar_random_unitary(2, k) for k in range(3)]
        m = assemble_blocks(blocks) * (1 + 1e-8)
        fixed_m, fixed = enforce_unitary(m, group_size=2)
        self.assertTrue(fixed)
        mask = la.block_diag(*[np.ones((2, 2))] * 3).astype(bool)
        self.assertTrue(np.all(fixed_m[~mask] == 0))
        self.assertLessEqual(unitarity_report(fixed_m).frobenius_drift, 1e-12)


class BlockFactorTests(SimpleTestCase):

    def test_batched_factor_matches_each_block(self):
        s = assemble_blocks([random_skew(3, k) for k in range(4)])
        blocks = extract_blocks(s, 3)
        self.assertEqual(blocks.shape, (4, 3, 3))
        factor = block_spectral_factor(blocks)
        assert_allclose(assemble_blocks(factor.expm(0.4)), la.expm(0.4 * s), atol=1e-12)
