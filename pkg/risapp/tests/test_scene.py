import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from risapp.exceptions import DimensionError, GeometryError, ScenarioError
from risapp.fisher import objective_g
from risapp.kernels import haar_random_unitary
from risapp.scattering import ScatteringMatrix
from risapp.scene import (
    build_channel, free_space_reference_gain, geometry_to_scene, ris_bs_channel,
    steering_derivative, steering_vector,
)

from .utils import make_scene, relative_error


class SteeringTests(SimpleTestCase):

    def test_reference_values(self):
        assert_allclose(steering_vector(0.0, 4, 0.5), np.ones(4))
        assert_allclose(steering_vector(math.pi / 2, 2, 0.5), [1, -1], atol=1e-12)
        assert_allclose(steering_vector(math.pi / 6, 3, 0.5), [1, -1j, -1], atol=1e-12)

    def test_derivative_vanishes_at_endfire_and_on_first_entry(self):
        np.testing.assert_array_equal(steering_derivative(math.pi / 2, 6, 0.5), np.zeros(6))
        self.assertEqual(steering_derivative(0.3, 6, 0.5)[0], 0)

    def test_derivative_matches_central_difference(self):
        step = 1e-6
        fd = (steering_vector(0.3 + step, 8, 0.5) - steering_vector(0.3 - step, 8, 0.5)) / (2 * step)
        self.assertLessEqual(relative_error(steering_derivative(0.3, 8, 0.5), fd), 1e-7)

    def test_empty_array_rejected(self):
        with self.assertRaises(DimensionError):
            steering_vector(0.1, 0, 0.5)


class GeometryTests(SimpleTestCase):

    def test_reference_layout(self):
        scene = geometry_to_scene((5.0, 0.0), (0.0, 20.0), (-10.0, 0.0), make_scene())
        d1 = math.hypot(5.0, 20.0)
        d2 = math.sqrt(500.0)
        expected = free_space_reference_gain(scene.wavelength) / (d1 * d2)
        self.assertAlmostEqual(abs(scene.alpha), expected, delta=1e-12 * expected)
        self.assertAlmostEqual(scene.theta, math.atan2(5.0, 20.0))
        self.assertAlmostEqual(scene.phi_r, math.atan2(-10.0, 20.0))
        self.assertAlmostEqual(scene.phi_bs, math.atan2(20.0, 10.0))

    def test_target_broadside_of_ris(self):
        scene = geometry_to_scene((0.0, 0.0), (0.0, 20.0), (-10.0, 0.0), make_scene())
        self.assertEqual(scene.theta, 0.0)

    def test_alpha_phase_is_seeded(self):
        a = geometry_to_scene((5.0, 0.0), (0.0, 20.0), (-10.0, 0.0), make_scene(), phase_seed=3)
        b = geometry_to_scene((5.0, 0.0), (0.0, 20.0), (-10.0, 0.0), make_scene(), phase_seed=3)
        self.assertEqual(a.alpha, b.alpha)
        self.assertNotEqual(np.angle(a.alpha), 0.0)

    def test_invalid_layouts(self):
        with self.assertRaises(GeometryError):
            geometry_to_scene((0.0, 20.0), (0.0, 20.0), (-10.0, 0.0), make_scene())
        with self.assertRaises(GeometryError):
            # objetivo detrás de la RIS
            geometry_to_scene((0.0, 30.0), (0.0, 20.0), (-10.0, 0.0), make_scene())

    def test_scenario_validation(self):
        with self.assertRaises(GeometryError):
            make_scene(theta=2.0)
        with self.assertRaises(GeometryError):
            make_scene(phi_r=math.pi / 2)
        with self.assertRaises(DimensionError):
            make_scene(n_r=0)
        with self.assertRaises(ScenarioError):
            make_scene(rician_k=-1.0)
        with self.assertRaises(ScenarioError):
            make_scene(noise_power=0.0)
        make_scene(theta=math.pi / 2)


class ChannelTests(SimpleTestCase):

    def test_single_element_los_channel(self):
        scene = make_scene(n_r=1, rician_k=math.inf, alpha=0.5 - 0.2j)
        bundle = build_channel(scene, np.eye(1))
        assert_allclose(bundle.h, scene.alpha * steering_vector(scene.phi_bs, 4, 0.5), atol=1e-15)

    def test_endfire_target_has_no_derivative(self):
        bundle = build_channel(make_scene(theta=math.pi / 2), haar_random_unitary(4, 0))
        np.testing.assert_array_equal(bundle.h_dot, np.zeros(4))

    def test_h_dot_matches_central_difference(self):
        phi = haar_random_unitary(8, 2)
        scene = make_scene(n_r=8)
        step = 1e-6
        plus = build_channel(scene.replace(theta=scene.theta + step), phi).h
        minus = build_channel(scene.replace(theta=scene.theta - step), phi).h
        fd = (plus - minus) / (2 * step)
        self.assertLessEqual(relative_error(build_channel(scene, phi).h_dot, fd), 1e-6)

    def test_linear_and_phase_covariant_in_phi(self):
        scene = make_scene(n_r=6)
        p1, p2 = haar_random_unitary(6, 1), haar_random_unitary(6, 2)
        combo = build_channel(scene, 0.3 * p1 - 1.7 * p2).h
        expected = 0.3 * build_channel(scene, p1).h - 1.7 * build_channel(scene, p2).h
        assert_allclose(combo, expected, atol=1e-12)
        phi = ScatteringMatrix.fully_connected(p1)
        rotated = build_channel(scene, phi.with_global_phase(0.8))
        base = build_channel(scene, phi)
        assert_allclose(rotated.h, np.exp(0.8j) * base.h, atol=1e-12)
        assert_allclose(rotated.h_dot, np.exp(0.8j) * base.h_dot, atol=1e-12)

    def test_norm_bound_for_unitary_phi(self):
        scene = make_scene(n_bs=8, n_r=16, alpha=0.7)
        for seed in range(5):
            bundle = build_channel(scene, haar_random_unitary(16, seed))
            bound = abs(scene.alpha) * np.linalg.norm(bundle.g_mat, 2) * math.sqrt(16)
            self.assertLessEqual(np.linalg.norm(bundle.h), bound * (1 + 1e-12))

    def test_los_link_is_rank_one_and_unidentifiable(self):
        scene = make_scene(n_bs=4, n_r=8, rician_k=math.inf)
        bundle = build_channel(scene, haar_random_unitary(8, 4))
        self.assertEqual(np.linalg.matrix_rank(bundle.g_mat), 1)
        ratio = objective_g(bundle) / np.vdot(bundle.h_dot, bundle.h_dot).real
        self.assertLessEqual(ratio, 1e-12)

    def test_rician_link_is_seeded_and_full_rank(self):
        scene = make_scene(n_bs=4, n_r=8, nlos_seed=11)
        np.testing.assert_array_equal(ris_bs_channel(scene), ris_bs_channel(scene))
        self.assertEqual(np.linalg.matrix_rank(ris_bs_channel(scene)), 4)
        self.assertFalse(np.allclose(ris_bs_channel(scene), ris_bs_channel(scene.replace(nlos_seed=12))))
        self.assertGreater(objective_g(build_channel(scene, haar_random_unitary(8, 4))), 0)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            build_channel(make_scene(n_r=4), np.eye(3))
