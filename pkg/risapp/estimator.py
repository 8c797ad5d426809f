"""Síntesis de observaciones, verosimilitud y estimador ML de theta.

Modelo de observación: Y = sqrt(P) h x^H + N, con x = [x_1, ..., x_L]^H los
pilotos (módulo unitario) y N ruido complejo circular de varianza sigma^2 por
entrada. Toda la aleatoriedad sale de generadores Philox sembrados, así cada
ensayo Monte Carlo es reproducible por separado.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConfigError, DimensionError, GridError
from .fisher import crb_theta
from .scattering import ScatteringMatrix
from .scene import build_channel, ris_bs_channel, steering_vector

logger = logging.getLogger(__name__)

PILOTS_ONES = 'ones'
PILOTS_QPSK = 'qpsk'

GRID_MARGIN = 0.01
GRID_POINTS = 2001


@dataclass(frozen=True)
class ObservationBlock:
    y: np.ndarray
    pilots: np.ndarray
    seed: Optional[int]

    @property
    def slots(self):
        return self.pilots.shape[0]


@dataclass(frozen=True)
class EstimateResult:
    theta_hat: float
    alpha_hat: complex
    concentrated_loglik: float
    grid_theta: float
    log_likelihood: float


@dataclass(frozen=True)
class ThetaGrid:
    lower: float = -math.pi / 2 + GRID_MARGIN
    upper: float = math.pi / 2 - GRID_MARGIN
    points: int = GRID_POINTS

    def values(self):
        if self.points < 3 or not self.lower < self.upper:
            raise GridError(f"grilla inválida: [{self.lower}, {self.upper}] con {self.points} puntos")
        if not -math.pi / 2 < self.lower or not self.upper < math.pi / 2:
            raise GridError(f"grilla [{self.lower}, {self.upper}] fuera de (-pi/2, pi/2)")
        return np.linspace(self.lower, self.upper, self.points)


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    mse: float
    bias: float
    crb: float

    @property
    def ratio(self):
        return self.mse / self.crb if self.crb > 0 else math.inf


def _matrix(phi):
    return phi.matrix if isinstance(phi, ScatteringMatrix) else np.asarray(phi, dtype=complex)


def _generator(seed):
    return np.random.Generator(np.random.Philox(seed))


def pilot_sequence(slots, kind=PILOTS_ONES, seed=None):
    if slots < 1:
        raise DimensionError("slots debe ser >= 1")
    if kind == PILOTS_ONES:
        return np.ones(slots, dtype=complex)
    if kind == PILOTS_QPSK:
        # flujo desplazado para no reutilizar los contadores del ruido
        rng = np.random.Generator(np.random.Philox(seed).jumped())
        symbols = rng.integers(0, 4, size=slots)
        return np.exp(1j * (np.pi / 4 + np.pi / 2 * symbols))
    raise ConfigError(f"tipo de piloto desconocido: {kind}")


def synthesize(scene, phi, seed, noiseless=False, pilots=PILOTS_ONES):
    """Genera Y (N_BS x L) para la escena y la Phi dadas."""
    x = pilot_sequence(scene.slots, pilots, seed)
    h = build_channel(scene, phi).h
    y = math.sqrt(scene.power) * np.outer(h, x.conj())
    if not noiseless:
        rng = _generator(seed)
        shape = y.shape
        noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        y = y + math.sqrt(scene.noise_power / 2.0) * noise
    return ObservationBlock(y=y, pilots=x, seed=seed)


def _check_block(obs, scene):
    if obs.y.shape != (scene.n_bs, scene.slots) or obs.pilots.shape != (scene.slots,):
        raise DimensionError(
            f"Y tiene forma {obs.y.shape}, se esperaba {(scene.n_bs, scene.slots)}")


def log_likelihood(obs, theta, alpha, phi, scene):
    """ln p(Y | theta, alpha) a partir del residuo directo."""
    _check_block(obs, scene)
    h = build_channel(scene.replace(theta=theta, alpha=alpha), phi).h
    residual = obs.y - math.sqrt(scene.power) * np.outer(h, obs.pilots.conj())
    sigma2 = scene.noise_power
    n_entries = scene.n_bs * scene.slots
    return -n_entries * math.log(math.pi * sigma2) - float(np.vdot(residual, residual).real) / sigma2


def log_likelihood_expanded(obs, theta, alpha, phi, scene):
    """Misma verosimilitud desarrollada en ||Y||^2, Re(h^H Y x) y ||h||^2 ||x||^2."""
    _check_block(obs, scene)
    h = build_channel(scene.replace(theta=theta, alpha=alpha), phi).h
    sqrt_p = math.sqrt(scene.power)
    x = obs.pilots
    quad = (float(np.vdot(obs.y, obs.y).real)
            - 2.0 * sqrt_p * float(np.vdot(h, obs.y @ x).real)
            + scene.power * float(np.vdot(h, h).real) * float(np.vdot(x, x).real))
    sigma2 = scene.noise_power
    return -scene.n_bs * scene.slots * math.log(math.pi * sigma2) - quad / sigma2


class GridSearch:
    """Verosimilitud concentrada |u^H Y x|^2 / ||u||^2 sobre una grilla de theta.

    u(theta) = G Phi a_RIS(theta) se precalcula una vez por (escena, Phi), así
    los ensayos Monte Carlo sólo pagan un producto matriz-vector.
    """

    def __init__(self, scene, phi, grid=None):
        self.scene = scene
        self.grid = grid or ThetaGrid()
        self.thetas = self.grid.values()
        self.m = _matrix(phi)
        if self.m.shape != (scene.n_r, scene.n_r):
            raise DimensionError(f"Phi tiene forma {self.m.shape}")
        self.g_phi = ris_bs_channel(scene) @ self.m
        steering = np.exp(-1j * 2.0 * np.pi * scene.d_ris
                          * np.outer(np.arange(scene.n_r), np.sin(self.thetas)))
        self.u = self.g_phi @ steering
        self.u_power = np.sum(np.abs(self.u) ** 2, axis=0)
        self.valid = self.u_power > 1e-300
        if not np.any(self.valid):
            raise GridError("u(theta) se anula en toda la grilla")

    def _u_at(self, theta):
        return self.g_phi @ steering_vector(theta, self.scene.n_r, self.scene.d_ris)

    def _concentrated(self, theta, yx):
        u = self._u_at(theta)
        power = float(np.vdot(u, u).real)
        if power <= 1e-300:
            return -math.inf
        return abs(np.vdot(u, yx)) ** 2 / power

    def profile(self, obs):
        _check_block(obs, self.scene)
        yx = obs.y @ obs.pilots
        z = self.u.conj().T @ yx
        values = np.full(self.thetas.shape, -np.inf)
        values[self.valid] = np.abs(z[self.valid]) ** 2 / self.u_power[self.valid]
        return values, yx

    def estimate(self, obs):
        values, yx = self.profile(obs)
        k = int(np.argmax(values))
        theta_grid = float(self.thetas[k])
        theta_hat, best = theta_grid, float(values[k])
        if 0 < k < len(values) - 1 and np.all(np.isfinite(values[k - 1:k + 2])):
            left, mid, right = values[k - 1], values[k], values[k + 1]
            curvature = left - 2.0 * mid + right
            if curvature < 0:
                offset = 0.5 * (left - right) / curvature
                step = self.thetas[1] - self.thetas[0]
                candidate = theta_grid + float(np.clip(offset, -0.5, 0.5)) * step
                refined = self._concentrated(candidate, yx)
                # la interpolación sólo se acepta si mejora el máximo de la grilla
                if refined > best:
                    theta_hat, best = candidate, refined
        u = self._u_at(theta_hat)
        alpha_hat = complex(np.vdot(u, yx)) / (
            math.sqrt(self.scene.power) * float(np.vdot(obs.pilots, obs.pilots).real)
            * float(np.vdot(u, u).real))
        return EstimateResult(
            theta_hat=theta_hat,
            alpha_hat=alpha_hat,
            concentrated_loglik=best,
            grid_theta=theta_grid,
            log_likelihood=log_likelihood(obs, theta_hat, alpha_hat, self.m, self.scene),
        )


def ml_estimate(obs, phi, scene, grid=None):
    """Estimador ML de (theta, alpha) con el resto de la escena conocido."""
    return GridSearch(scene, phi, grid).estimate(obs)


def trial_seed(seed, k):
    return np.random.SeedSequence([seed, k]).generate_state(2)


def monte_carlo_mse(scene, phi, trials, seed, grid=None, workers=1, pilots=PILOTS_ONES):
    """MSE empírico de theta_hat frente a la CRB, con sub-semillas por ensayo."""
    if trials < 1:
        raise ConfigError("trials debe ser >= 1")
    search = GridSearch(scene, phi, grid)

    def run(k):
        obs = synthesize(scene, phi, trial_seed(seed, k), pilots=pilots)
        return search.estimate(obs).theta_hat - scene.theta

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = np.array(list(pool.map(run, range(trials))))
    else:
        errors = np.array([run(k) for k in range(trials)])
    bound = crb_theta(build_channel(scene, phi), scene)
    result = MonteCarloResult(
        trials=trials,
        mse=float(np.mean(errors ** 2)),
        bias=float(np.mean(errors)),
        crb=bound,
    )
    logger.info("Monte Carlo (%d ensayos): MSE=%.4e CRB=%.4e razón=%.3f",
                trials, result.mse, result.crb, result.ratio)
    return result


def noise_for_crb(scene, phi, target_crb):
    """Potencia de ruido con la que la CRB de la escena vale ``target_crb``."""
    current = crb_theta(build_channel(scene, phi), scene)
    if not math.isfinite(current) or target_crb <= 0:
        raise ConfigError("no se puede escalar el ruido: CRB infinita o objetivo no positivo")
    return scene.noise_power * target_crb / current
