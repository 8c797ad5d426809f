import json
import math

import numpy as np
from django.test import SimpleTestCase

from risapp.estimator import PILOTS_ONES, PILOTS_QPSK
from risapp.exceptions import DimensionError, StepRangeError
from risapp.fisher import fim_blocks
from risapp.kernels import haar_random_unitary
from risapp.optimizer import (
    CONVERGED, MAX_ITERS, OptimizerConfig, OptimizerTrace, ascent_grouped, euclidean_gradient,
)
from risapp.scattering import ScatteringMatrix
from risapp.scene import build_channel
from risapp.verification import (
    CheckResult, VerificationReport, check_fim, check_gradient, check_los_unidentifiable,
    check_manifold, check_scaling, check_stationarity, check_u2, fd_gradient_oracle,
    fim_from_mean_derivatives, fim_from_pilot_means, fim_mismatch, richardson_ratio, u2_brute_force,
)

from .utils import make_scene, physical_scene


class OracleTests(SimpleTestCase):

    def setUp(self):
        self.scene = make_scene(n_bs=4, n_r=4)
        self.phi = haar_random_unitary(4, 12)

    def test_step_outside_range(self):
        for step in (1e-9, 1e-3):
            with self.assertRaises(StepRangeError):
                fd_gradient_oracle(self.phi, self.scene, step)

    def test_linear_objective(self):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        oracle = fd_gradient_oracle(np.eye(3), None, 1e-6,
                                    objective=lambda x: float(np.vdot(m, x).real))
        np.testing.assert_allclose(oracle, 0.5 * m, atol=1e-8)

    def test_endfire_gradient_vanishes(self):
        scene = self.scene.replace(theta=math.pi / 2)
        np.testing.assert_array_equal(fd_gradient_oracle(self.phi, scene), np.zeros((4, 4)))
        np.testing.assert_array_equal(euclidean_gradient(self.phi, scene), np.zeros((4, 4)))

    def test_central_differences_are_second_order(self):
        ratio = richardson_ratio(self.phi, self.scene)
        self.assertGreaterEqual(ratio, 3.0)
        self.assertLessEqual(ratio, 5.0)

    def test_fim_matches_mean_derivatives(self):
        for scene in (self.scene.replace(alpha=0.6 + 0.5j), physical_scene(n_r=4, n_bs=4)):
            fim = fim_blocks(build_channel(scene, self.phi), scene).assemble()
            self.assertLessEqual(fim_mismatch(fim, fim_from_mean_derivatives(scene, self.phi)), 1e-6)

    def test_fim_matches_pilot_mean_derivatives(self):
        for scene in (self.scene.replace(alpha=0.6 + 0.5j), physical_scene(n_r=4, n_bs=4)):
            fim = fim_blocks(build_channel(scene, self.phi), scene).assemble()
            for pilots in (PILOTS_ONES, PILOTS_QPSK):
                reference = fim_from_pilot_means(scene, self.phi, pilots, seed=3)
                self.assertLessEqual(fim_mismatch(fim, reference), 1e-9)

    def test_pilot_oracle_rejects_the_printed_blocks(self):
        scene = self.scene.replace(alpha=0.6 + 0.5j)
        printed = fim_blocks(build_channel(scene, self.phi), scene, nuisance='printed').assemble()
        self.assertGreater(fim_mismatch(printed, fim_from_pilot_means(scene, self.phi)), 1e-3)

    def test_brute_force_needs_two_elements(self):
        with self.assertRaises(DimensionError):
            u2_brute_force(self.scene)

    def test_brute_force_point_reproduces_value(self):
        scene = make_scene(n_r=2)
        best_g, (t, a, b) = u2_brute_force(scene, step=math.pi / 40)
        u = np.array([[np.exp(1j * a) * math.cos(t), np.exp(1j * b) * math.sin(t)],
                      [-np.exp(-1j * b) * math.sin(t), np.exp(-1j * a) * math.cos(t)]])
        bundle = build_channel(scene, u)
        residual = bundle.h_dot - (np.vdot(bundle.h, bundle.h_dot) / np.vdot(bundle.h, bundle.h)) * bundle.h
        self.assertAlmostEqual(best_g / float(np.vdot(residual, residual).real), 1.0, places=9)


class CheckTests(SimpleTestCase):

    def test_gradient_check_passes_and_detects_sign_flip(self):
        base = make_scene()
        self.assertTrue(check_gradient(base, seed=0, pairs=10).passed)
        flipped = check_gradient(base, seed=0, pairs=3, flip_sign=True)
        self.assertFalse(flipped.passed)
        self.assertGreater(flipped.measured, 1.0)

    def test_fim_check(self):
        result = check_fim(physical_scene(n_r=4, n_bs=4), seed=1, draws=50)
        self.assertTrue(result.passed, result)

    def test_scaling_check(self):
        scene = physical_scene()
        result = check_scaling(scene, ScatteringMatrix.random(8, 8, 0))
        self.assertTrue(result.passed)
        self.assertEqual(set(result.detail), {'slots', 'noise_power', 'power'})

    def test_manifold_check(self):
        config = OptimizerConfig(max_iters=100, seed=4)
        result, trace = check_manifold(physical_scene(), config)
        self.assertTrue(result.passed, result)
        self.assertEqual(result.detail['iterations'], trace.iterations)

    def test_stationarity_is_a_hard_check(self):
        stationary = OptimizerTrace(initial_g=1.0, initial_crb=1.0, status=CONVERGED,
                                    initial_eta=2.0, final_eta=1e-5)
        result = check_stationarity(stationary)
        self.assertTrue(result.passed)
        self.assertFalse(result.informational)
        moving = OptimizerTrace(initial_g=1.0, initial_crb=1.0, status=MAX_ITERS,
                                initial_eta=2.0, final_eta=0.1)
        self.assertFalse(check_stationarity(moving).passed)
        report = VerificationReport(seed=0, checks=[check_stationarity(moving)])
        self.assertEqual(report.failures, ['stationarity'])

    def test_stationarity_of_a_converged_run(self):
        _, trace = ascent_grouped(make_scene(n_r=4), 4, OptimizerConfig(max_iters=5000, seed=2))
        self.assertEqual(trace.status, CONVERGED)
        self.assertTrue(check_stationarity(trace).passed)

    def test_two_element_ascent_reaches_brute_force(self):
        config = OptimizerConfig(max_iters=500, restarts=4, seed=0)
        result = check_u2(make_scene(n_r=2), config)
        self.assertTrue(result.passed, result)

    def test_line_of_sight_link_is_flagged(self):
        result = check_los_unidentifiable(make_scene(), seed=0)
        self.assertTrue(result.informational)
        self.assertLess(result.measured, 1e-12)


class ReportTests(SimpleTestCase):

    def test_report_json(self):
        report = VerificationReport(seed=7, checks=[
            CheckResult('a', True, 0.5, 1.0),
            CheckResult('b', False, math.inf, 1.0, informational=True),
        ])
        self.assertTrue(report.passed)
        payload = json.loads(json.dumps(report.as_dict()))
        self.assertEqual(payload['seed'], 7)
        self.assertEqual(payload['checks'][1]['measured'], 'inf')

    def test_failures_are_listed(self):
        report = VerificationReport(seed=0, checks=[
            CheckResult('gradient_fd', False, 2.0, 1e-6),
            CheckResult('crb_scaling', True, 0.0, 1e-12),
        ])
        self.assertFalse(report.passed)
        self.assertEqual(report.failures, ['gradient_fd'])
