"""Ascenso de máxima pendiente Riemanniano y adaptativo sobre el grupo unitario.

El objetivo es g(Phi) = ||h_dot||^2 - |h_dot^H h|^2 / ||h||^2. Internamente el
ascenso trabaja con g / |alpha|^2 (una escena con alpha = 1), de modo que los
pasos mu no dependen de la pérdida de trayecto; las trazas se reportan en
unidades físicas.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np
import scipy.linalg as la

from .exceptions import (
    ConfigError, DegenerateSceneError, DimensionError, NotUnitaryError,
)
from .fisher import EPS_CHANNEL, crb_from_g, objective_g
from .kernels import (
    assemble_blocks, block_spectral_factor, enforce_unitary, extract_blocks,
    haar_random_unitary, unitarity_report,
)
from .scattering import UNITARY_TOL, ScatteringMatrix, block_mask
from .scene import build_channel

logger = logging.getLogger(__name__)

CONVERGED = 'converged'
MAX_ITERS = 'max_iters'
DEGENERATE = 'degenerate'

STATIONARITY_RATIO = 1e-4


@dataclass(frozen=True)
class OptimizerConfig:
    mu_init: float = 1e-2
    epsilon: float = 1e-6
    max_iters: int = 2000
    max_halvings: int = 30
    max_doublings: int = 30
    restarts: int = 4
    seed: int = 0
    expm_method: str = 'spectral'

    def __post_init__(self):
        for name in ('mu_init', 'epsilon', 'max_iters', 'max_halvings', 'max_doublings', 'restarts'):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} debe ser positivo")
        if not self.epsilon < 1:
            raise ConfigError("epsilon debe ser < 1")
        if self.expm_method not in ('spectral', 'pade'):
            raise ConfigError(f"expm_method desconocido: {self.expm_method}")


@dataclass(frozen=True)
class GradientWorkspace:
    a_mat: complex
    b_tr: float
    omega: np.ndarray
    lambda2: np.ndarray
    c2: np.ndarray
    d2: np.ndarray
    euclidean: np.ndarray


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    g_value: float
    crb_theta: float
    mu: float
    eta: float
    unitarity_drift: float
    halvings: int
    doublings: int
    skew_residual: float = 0.0


@dataclass
class OptimizerTrace:
    initial_g: float
    initial_crb: float
    records: List[IterationRecord] = field(default_factory=list)
    status: str = MAX_ITERS
    initial_eta: float = 0.0
    final_eta: float = 0.0

    @property
    def iterations(self):
        return len(self.records)

    @property
    def final_g(self):
        return self.records[-1].g_value if self.records else self.initial_g

    @property
    def final_crb(self):
        return self.records[-1].crb_theta if self.records else self.initial_crb

    @property
    def g_values(self):
        return [self.initial_g] + [r.g_value for r in self.records]


@dataclass(frozen=True)
class RandomBaseline:
    samples: int
    g_mean: float
    g_min: float
    g_max: float
    crb_mean: float
    crb_min: float
    crb_max: float


def _matrix(phi):
    return phi.matrix if isinstance(phi, ScatteringMatrix) else np.asarray(phi, dtype=complex)


def _check_unitary(phi):
    m = _matrix(phi)
    drift = unitarity_report(m).frobenius_drift
    if drift > UNITARY_TOL:
        raise NotUnitaryError(f"Phi no es unitaria (deriva {drift:.3e})")
    return m


def gradient_workspace(phi, scene):
    """Cadena de diferenciales para dg/dPhi* (convención de Wirtinger).

    Con A = h h_dot^H y B = h h^H:
      Omega = tr(A)^* a adot^H + tr(A) adot a^H
      dg/dPhi* = |alpha|^2 [Lambda2 - C2 / tr(B) + |tr(A)|^2 D2 / tr(B)^2]^T
    donde Lambda2 = (G^H G Phi adot adot^H)^T, C2 = (G^H G Phi Omega)^T y
    D2 = (G^H G Phi a a^H)^T.
    """
    m = _matrix(phi)
    bundle = build_channel(scene, m)
    b_tr = float(np.vdot(bundle.h, bundle.h).real)
    if b_tr <= EPS_CHANNEL:
        raise DegenerateSceneError(f"||h||^2 = {b_tr:.3e} <= {EPS_CHANNEL:g}")
    a = bundle.a_ris_theta
    a_dot = bundle.a_ris_dot
    a_mat = complex(np.vdot(bundle.h_dot, bundle.h))
    omega = np.conj(a_mat) * np.outer(a, a_dot.conj()) + a_mat * np.outer(a_dot, a.conj())
    ggp = bundle.g_mat.conj().T @ bundle.g_mat @ m
    lambda2 = (ggp @ np.outer(a_dot, a_dot.conj())).T
    c2 = (ggp @ omega).T
    d2 = (ggp @ np.outer(a, a.conj())).T
    core = lambda2 - c2 / b_tr + (abs(a_mat) ** 2 / b_tr ** 2) * d2
    euclidean = abs(scene.alpha) ** 2 * core.T
    return GradientWorkspace(a_mat, b_tr, omega, lambda2, c2, d2, euclidean)


def euclidean_gradient(phi, scene):
    return gradient_workspace(phi, scene).euclidean


def riemannian_gradient(phi, gamma_euc):
    m = _check_unitary(phi)
    return gamma_euc - m @ gamma_euc.conj().T @ m


def geodesic_gradient(phi, gamma_euc):
    m = _check_unitary(phi)
    x = gamma_euc @ m.conj().T
    return x - x.conj().T


def riemannian_metric(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise DimensionError(f"formas distintas: {x.shape} vs {y.shape}")
    return 0.5 * float(np.vdot(y, x).real)


class _Objective:
    """Evalúa g en escala |alpha| = 1 reutilizando los vectores de la escena."""

    def __init__(self, scene):
        self.unit_scene = scene.replace(alpha=1.0)
        self.scale = abs(scene.alpha) ** 2
        self.scene = scene
        self._bundle = build_channel(self.unit_scene, np.eye(scene.n_r, dtype=complex))

    def __call__(self, m):
        bundle = self._bundle
        g_mat = bundle.g_mat
        candidate = replace(bundle, h=g_mat @ (m @ bundle.a_ris_theta),
                        h_dot=g_mat @ (m @ bundle.a_ris_dot))
        return objective_g(candidate)

    def safe(self, m):
        try:
            return self(m)
        except DegenerateSceneError:
            return -math.inf

    def physical(self, g_unit):
        return g_unit * self.scale

    def physical_eta(self, eta_unit):
        # S escala con |alpha|^2, eta con |alpha|^4
        return eta_unit * self.scale ** 2

    def crb(self, g_unit):
        return crb_from_g(self.physical(g_unit), self.scene)


class _Rotation:
    """R(mu) = exp(mu S) por bloques, con una sola factorización por iteración."""

    def __init__(self, s_blocks, method):
        self.method = method
        self.blocks = s_blocks
        if method == 'spectral':
            self.factor = block_spectral_factor(s_blocks)

    def at(self, mu):
        if self.method == 'spectral':
            return assemble_blocks(self.factor.expm(mu))
        return assemble_blocks([la.expm(mu * s) for s in self.blocks])


def _geodesic_direction(m, scene_unit, group_size):
    """Gradiente geodésico restringido al soporte de bloques de Phi."""
    gamma = euclidean_gradient(m, scene_unit)
    n = m.shape[0]
    if group_size != n:
        gamma = np.where(block_mask(n, group_size), gamma, 0)
    phi_blocks = extract_blocks(m, group_size)
    gamma_blocks = extract_blocks(gamma, group_size)
    x = gamma_blocks @ np.swapaxes(phi_blocks.conj(), -1, -2)
    s_blocks = x - np.swapaxes(x.conj(), -1, -2)
    eta = 0.5 * float(np.sum(np.abs(s_blocks) ** 2))
    return s_blocks, eta


def _skew_residual(s_blocks):
    return float(np.linalg.norm(s_blocks + np.swapaxes(s_blocks.conj(), -1, -2)))


def _normalize_diagonal(m):
    d = np.diag(m)
    return np.diag(d / np.abs(d))


def ascent(scene, phi0, config):
    """Ascenso Riemanniano adaptativo desde ``phi0`` respetando su arquitectura.

    Por iteración: gradiente euclídeo, dirección geodésica S, eta = <S, S>,
    R = exp(mu S). Se divide mu a la mitad mientras g(R Phi) - g(Phi) < mu eta / 2
    y se duplica (R <- R^2) mientras g(R^2 Phi) - g(Phi) >= mu eta.

    La corrida sólo termina como ``converged`` cuando el cambio relativo de g
    cae bajo epsilon y además eta <= STATIONARITY_RATIO * eta inicial; si no,
    sigue hasta ``max_iters``.
    """
    if phi0.n != scene.n_r:
        raise DimensionError(f"Phi0 es {phi0.n}x{phi0.n}, la escena tiene N_R = {scene.n_r}")
    objective = _Objective(scene)
    group_size = phi0.group_size
    m = phi0.matrix.copy()
    g_curr = objective(m)
    trace = OptimizerTrace(initial_g=objective.physical(g_curr), initial_crb=objective.crb(g_curr))
    mu = config.mu_init
    initial_eta = None
    small_change = False
    eta = None

    for t in range(1, config.max_iters + 1):
        s_blocks, eta = _geodesic_direction(m, objective.unit_scene, group_size)
        if initial_eta is None:
            initial_eta = eta
        if small_change and eta <= STATIONARITY_RATIO * initial_eta:
            trace.status = CONVERGED
            break
        if eta == 0.0 or g_curr == 0.0:
            # punto estacionario: se registra la iteración sin mover Phi
            trace.records.append(IterationRecord(
                t, objective.physical(g_curr), objective.crb(g_curr), mu, objective.physical_eta(eta),
                unitarity_report(m).frobenius_drift, 0, 0))
            trace.status = CONVERGED
            break
        rotation = _Rotation(s_blocks, config.expm_method)
        r = rotation.at(mu)
        g_new = objective.safe(r @ m)
        halvings = 0
        exhausted = False
        while g_new - g_curr < 0.5 * mu * eta:
            if halvings == config.max_halvings:
                exhausted = True
                break
            mu *= 0.5
            halvings += 1
            r = rotation.at(mu)
            g_new = objective.safe(r @ m)

        doublings = 0
        if exhausted:
            logger.warning("paso agotado tras %d mitades (mu=%.3e)", halvings, mu)
            if not g_new > g_curr:
                # estancado: Phi no cambiaría en las iteraciones siguientes
                if eta <= STATIONARITY_RATIO * initial_eta:
                    trace.status = CONVERGED
                break
        else:
            while doublings < config.max_doublings:
                r2 = r @ r
                g2 = objective.safe(r2 @ m)
                if g2 - g_curr < mu * eta:
                    break
                mu *= 2.0
                doublings += 1
                r, g_new = r2, g2

        m_next = r @ m
        if group_size == 1:
            m_next = _normalize_diagonal(m_next)
        else:
            m_next, fixed = enforce_unitary(m_next, group_size)
            if fixed:
                g_new = objective(m_next)
        g_prev, g_curr, m = g_curr, g_new, m_next
        trace.records.append(IterationRecord(
            iteration=t,
            g_value=objective.physical(g_curr),
            crb_theta=objective.crb(g_curr),
            mu=mu,
            eta=objective.physical_eta(eta),
            unitarity_drift=unitarity_report(m).frobenius_drift,
            halvings=halvings,
            doublings=doublings,
            skew_residual=_skew_residual(s_blocks),
        ))
        logger.debug("iter %d: g=%.6e mu=%.3e eta=%.3e (%d/%d)",
                     t, g_curr, mu, eta, halvings, doublings)
        small_change = abs(g_curr - g_prev) <= config.epsilon * abs(g_prev)
        eta = None

    if eta is None:
        try:
            eta = _geodesic_direction(m, objective.unit_scene, group_size)[1]
        except DegenerateSceneError:
            trace.status = DEGENERATE
            eta = math.inf
        if trace.status == MAX_ITERS and small_change and eta <= STATIONARITY_RATIO * initial_eta:
            trace.status = CONVERGED
    trace.initial_eta = objective.physical_eta(initial_eta)
    trace.final_eta = objective.physical_eta(eta)
    result = ScatteringMatrix(m, group_size)
    logger.info("ascenso (%s): %d iteraciones, g=%.6e, CRB=%.4e rad^2, estado=%s",
                result.architecture, trace.iterations, trace.final_g, trace.final_crb, trace.status)
    return result, trace


def ascent_grouped(scene, group_size, config):
    """Un ascenso desde una inicialización aleatoria por bloques (semilla de ``config``)."""
    phi0 = ScatteringMatrix.random(scene.n_r, group_size, config.seed)
    return ascent(scene, phi0, config)


def restart_seed(seed, k):
    return seed if k == 0 else np.random.SeedSequence([seed, k])


def _pick_best(results):
    best = None
    for phi, trace in results:
        if best is None or trace.final_g > best[1].final_g:
            best = (phi, trace)
    return best


def best_of_restarts(scene, group_size, config, restarts=None, warm_starts=(), workers=1):
    """Multi-arranque: el mejor g entre ``restarts`` inicializaciones aleatorias.

    ``warm_starts`` agrega puntos de partida ya factibles para ``group_size``
    (por ejemplo el óptimo de un tamaño de grupo menor). Con empates gana el
    primer arranque, así el resultado no depende de ``workers``.
    """
    restarts = config.restarts if restarts is None else restarts
    starts = [ScatteringMatrix.random(scene.n_r, group_size, restart_seed(config.seed, k))
              for k in range(restarts)]
    starts += [ScatteringMatrix(_matrix(phi), group_size) for phi in warm_starts]
    if not starts:
        raise ConfigError("se necesita al menos un punto de partida")
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda phi0: ascent(scene, phi0, config), starts))
    else:
        results = [ascent(scene, phi0, config) for phi0 in starts]
    return _pick_best(results)


def optimize_nested(scene, group_sizes, config, restarts=None, workers=1):
    """Optimiza cada tamaño de grupo reutilizando el óptimo de los divisores previos.

    Un Phi por bloques de tamaño g también es factible para cualquier múltiplo
    de g, y el ascenso es monótono, así que el g óptimo queda ordenado.
    """
    results = {}
    for g in sorted(set(group_sizes)):
        warm = [results[p][0] for p in sorted(results) if g % p == 0]
        results[g] = best_of_restarts(scene, g, config, restarts, warm_starts=warm[-1:], workers=workers)
    return results


def random_unitary_objective(scene, seed, samples):
    """Estadísticas de g y CRB para matrices unitarias Haar (sin optimizar)."""
    if samples < 1:
        raise ConfigError("samples debe ser >= 1")
    rng = np.random.default_rng(seed)
    g_values = np.empty(samples)
    for k in range(samples):
        phi = haar_random_unitary(scene.n_r, rng)
        g_values[k] = objective_g(build_channel(scene, phi))
    crbs = np.array([crb_from_g(g, scene) for g in g_values])
    return RandomBaseline(
        samples=samples,
        g_mean=float(g_values.mean()),
        g_min=float(g_values.min()),
        g_max=float(g_values.max()),
        crb_mean=float(crbs.mean()),
        crb_min=float(crbs.min()),
        crb_max=float(crbs.max()),
    )
