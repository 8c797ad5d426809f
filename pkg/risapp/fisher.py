"""Bloques de la matriz de información de Fisher y CRB del ángulo theta.

Parámetros desconocidos: xi = [theta, Re alpha, Im alpha]. La FIM se arma con
``nuisance='score'`` (derivadas exactas de la media, dh/dRe(alpha) = h/alpha)
o con ``nuisance='printed'`` (bloques escritos con h en lugar de h/alpha).
Ambas formas tienen el mismo complemento de Schur, es decir, la misma CRB.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSceneError, NonFiniteError

logger = logging.getLogger(__name__)

EPS_CHANNEL = 1e-30


@dataclass(frozen=True)
class FisherBlocks:
    f_theta_theta: float
    f_theta_alpha: np.ndarray
    f_alpha_alpha: np.ndarray
    crb_theta: float
    g_value: float

    def assemble(self):
        fim = np.empty((3, 3))
        fim[0, 0] = self.f_theta_theta
        fim[0, 1:] = self.f_theta_alpha
        fim[1:, 0] = self.f_theta_alpha
        fim[1:, 1:] = self.f_alpha_alpha
        return fim


def _check_finite(bundle):
    if not (np.all(np.isfinite(bundle.h)) and np.all(np.isfinite(bundle.h_dot))):
        raise NonFiniteError("el canal contiene valores no finitos")


def channel_power(bundle):
    return float(np.vdot(bundle.h, bundle.h).real)


def objective_g(bundle):
    """g = ||h_dot||^2 - |h_dot^H h|^2 / ||h||^2 = ||P_perp(h) h_dot||^2 >= 0."""
    _check_finite(bundle)
    b = channel_power(bundle)
    if b <= EPS_CHANNEL:
        raise DegenerateSceneError(f"||h||^2 = {b:.3e} <= {EPS_CHANNEL:g}")
    h, h_dot = bundle.h, bundle.h_dot
    residual = h_dot - (np.vdot(h, h_dot) / b) * h
    return float(np.vdot(residual, residual).real)


def crb_from_g(g_value, scene):
    if g_value <= 0:
        return math.inf
    return 1.0 / (scene.snr_scale * g_value)


def crb_theta(bundle, scene):
    return crb_from_g(objective_g(bundle), scene)


def fim_blocks(bundle, scene, nuisance='score'):
    g_value = objective_g(bundle)
    scale = scene.snr_scale
    h, h_dot = bundle.h, bundle.h_dot
    if nuisance == 'score':
        # derivada exacta de la media respecto de alpha
        h = h / scene.alpha
    elif nuisance != 'printed':
        raise ValueError(f"convención desconocida: {nuisance}")
    cross = np.vdot(h_dot, h)
    return FisherBlocks(
        f_theta_theta=scale * float(np.vdot(h_dot, h_dot).real),
        f_theta_alpha=scale * np.array([cross.real, -cross.imag]),
        f_alpha_alpha=scale * float(np.vdot(h, h).real) * np.eye(2),
        crb_theta=crb_from_g(g_value, scene),
        g_value=g_value,
    )


def crb_via_schur(blocks):
    """Complemento de Schur F_tt - F_ta F_aa^-1 F_ta^T, invertido."""
    schur = blocks.f_theta_theta - blocks.f_theta_alpha @ np.linalg.solve(
        blocks.f_alpha_alpha, blocks.f_theta_alpha)
    return math.inf if schur <= 0 else 1.0 / schur


def crb_via_inverse(blocks):
    """[F^-1]_11 de la FIM 3x3, equilibrada por su diagonal antes de invertir."""
    fim = blocks.assemble()
    scale = np.sqrt(np.diag(fim))
    if np.any(scale <= 0):
        return math.inf
    try:
        value = float(np.linalg.inv(fim / np.outer(scale, scale))[0, 0]) / scale[0] ** 2
    except np.linalg.LinAlgError:
        return math.inf
    return value if value > 0 else math.inf
