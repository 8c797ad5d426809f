"""Modelo físico: geometría, vectores de dirección y canal en cascada.

Convenciones (el sistema de referencia es el plano x-y, en metros):

* La normal del arreglo de la BS es el eje +x; el eje del arreglo es +y.
* La normal de la RIS es el eje -y; el eje del arreglo es +x.
* Los ángulos se miden desde broadside: ``atan2(d . eje, d . normal)``.
* Los espaciamientos se guardan en longitudes de onda, así lambda se cancela
  en las fases y sólo aparece en la pérdida de trayecto.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .exceptions import DimensionError, GeometryError, NonFiniteError, ScenarioError
from .scattering import ScatteringMatrix

SPEED_OF_LIGHT = 299_792_458.0
HALF_PI = math.pi / 2

BS_NORMAL = np.array([1.0, 0.0])
BS_AXIS = np.array([0.0, 1.0])
RIS_NORMAL = np.array([0.0, -1.0])
RIS_AXIS = np.array([1.0, 0.0])


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def free_space_reference_gain(wavelength):
    """Ganancia de referencia a 1 m para el producto de dos saltos."""
    return (wavelength / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class Positions:
    target: Tuple[float, float]
    ris: Tuple[float, float]
    bs: Tuple[float, float]


@dataclass(frozen=True)
class Scenario:
    n_bs: int
    n_r: int
    theta: float
    phi_r: float
    phi_bs: float
    alpha: complex
    power: float
    noise_power: float
    slots: int
    d_bs: float = 0.5
    d_ris: float = 0.5
    wavelength: float = SPEED_OF_LIGHT / 3.5e9
    pathloss_exponent: float = 2.0
    reference_gain: Optional[float] = None
    rician_k: float = 10.0
    nlos_seed: int = 0
    positions: Optional[Positions] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_bs < 1 or self.n_r < 1 or self.slots < 1:
            raise DimensionError("n_bs, n_r y slots deben ser >= 1")
        for name in ('power', 'noise_power', 'wavelength', 'd_bs', 'd_ris'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ScenarioError(f"{name} debe ser positivo y finito, se recibió {value}")
        if not -HALF_PI <= self.theta <= HALF_PI:
            raise GeometryError(f"theta = {self.theta} fuera de [-pi/2, pi/2]")
        for name in ('phi_r', 'phi_bs'):
            value = getattr(self, name)
            if not -HALF_PI < value < HALF_PI:
                raise GeometryError(f"{name} = {value} fuera de (-pi/2, pi/2)")
        if math.isnan(self.rician_k) or self.rician_k < 0:
            raise ScenarioError(f"rician_k debe ser >= 0 (inf = sólo LoS), se recibió {self.rician_k}")
        if not np.isfinite(complex(self.alpha)):
            raise NonFiniteError("alpha no es finito")
        object.__setattr__(self, 'alpha', complex(self.alpha))
        if self.positions is not None:
            self._check_positions()

    def _check_positions(self):
        theta, phi_r, phi_bs, magnitude = _geometry_terms(
            self.positions.target, self.positions.ris, self.positions.bs,
            self.pathloss_exponent, self.gain,
        )
        expected = np.array([theta, phi_r, phi_bs])
        actual = np.array([self.theta, self.phi_r, self.phi_bs])
        if not np.allclose(expected, actual, rtol=0, atol=1e-9) or \
                not math.isclose(abs(self.alpha), magnitude, rel_tol=1e-9):
            raise GeometryError("ángulos o |alpha| no coinciden con las posiciones")

    @property
    def gain(self):
        if self.reference_gain is not None:
            return self.reference_gain
        return free_space_reference_gain(self.wavelength)

    @property
    def snr_scale(self):
        """2LP/sigma^2, el factor común de todos los bloques de Fisher."""
        return 2.0 * self.slots * self.power / self.noise_power

    def replace(self, **changes):
        if 'positions' not in changes and any(
                k in changes for k in ('theta', 'phi_r', 'phi_bs', 'alpha')):
            changes['positions'] = None
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelBundle:
    a_bs: np.ndarray
    a_ris_theta: np.ndarray
    a_ris_phi: np.ndarray
    a_ris_dot: np.ndarray
    g_mat: np.ndarray
    h: np.ndarray
    h_dot: np.ndarray


def steering_vector(beta, n, spacing):
    if n < 1:
        raise DimensionError(f"n debe ser >= 1, se recibió {n}")
    k = np.arange(n)
    return np.exp(-1j * 2.0 * np.pi * spacing * k * np.sin(beta))


def _cos(angle):
    # en endfire (+-pi/2) la derivada debe anularse exactamente
    return 0.0 if abs(angle) == HALF_PI else math.cos(angle)


def steering_derivative(theta, n, spacing):
    a = steering_vector(theta, n, spacing)
    k = np.arange(n)
    return (-1j * 2.0 * np.pi * spacing * _cos(theta)) * k * a


def _broadside_angle(direction, normal, axis):
    along_normal = float(direction @ normal)
    if along_normal <= 0:
        raise GeometryError("el punto queda detrás del arreglo (ángulo fuera de (-pi/2, pi/2))")
    return math.atan2(float(direction @ axis), along_normal)


def _geometry_terms(target_pos, ris_pos, bs_pos, exponent, gain):
    target, ris, bs = (np.asarray(p, dtype=float) for p in (target_pos, ris_pos, bs_pos))
    for a, b, label in ((target, ris, 'objetivo-RIS'), (ris, bs, 'RIS-BS'), (target, bs, 'objetivo-BS')):
        if np.allclose(a, b):
            raise GeometryError(f"posiciones coincidentes ({label})")
    d1 = float(np.linalg.norm(target - ris))
    d2 = float(np.linalg.norm(ris - bs))
    theta = _broadside_angle(target - ris, RIS_NORMAL, RIS_AXIS)
    phi_r = _broadside_angle(bs - ris, RIS_NORMAL, RIS_AXIS)
    phi_bs = _broadside_angle(ris - bs, BS_NORMAL, BS_AXIS)
    magnitude = gain / (d1 ** (exponent / 2.0) * d2 ** (exponent / 2.0))
    return theta, phi_r, phi_bs, magnitude


def geometry_to_scene(target_pos, ris_pos, bs_pos, base, phase_seed=None):
    """Deriva theta, phi_R, phi_BS y alpha a partir de coordenadas 2-D.

    La fase de alpha es 0 salvo que se entregue ``phase_seed``, en cuyo caso
    se sortea uniforme en [0, 2pi) de forma determinista.
    """
    theta, phi_r, phi_bs, magnitude = _geometry_terms(
        target_pos, ris_pos, bs_pos, base.pathloss_exponent, base.gain)
    phase = 0.0
    if phase_seed is not None:
        phase = float(np.random.default_rng(phase_seed).uniform(0.0, 2.0 * np.pi))
    positions = Positions(tuple(map(float, target_pos)), tuple(map(float, ris_pos)),
                          tuple(map(float, bs_pos)))
    return replace(base, theta=theta, phi_r=phi_r, phi_bs=phi_bs,
                   alpha=magnitude * np.exp(1j * phase), positions=positions)


def _phi_matrix(phi):
    if isinstance(phi, ScatteringMatrix):
        return phi.matrix
    return np.asarray(phi, dtype=complex)


def ris_bs_channel(scene, a_bs=None, a_ris_phi=None):
    """G = sqrt(K/(K+1)) a_BS a_RIS^H + sqrt(1/(K+1)) G_nlos.

    Con K = inf el enlace es LoS puro y G tiene rango 1; en ese caso h y h_dot
    son colineales y g(Phi) = 0 para toda Phi. La componente NLoS es CN(0, 1)
    i.i.d. sorteada con ``nlos_seed``.
    """
    if a_bs is None:
        a_bs = steering_vector(scene.phi_bs, scene.n_bs, scene.d_bs)
    if a_ris_phi is None:
        a_ris_phi = steering_vector(scene.phi_r, scene.n_r, scene.d_ris)
    los = np.outer(a_bs, a_ris_phi.conj())
    k = scene.rician_k
    if math.isinf(k):
        return los
    rng = np.random.default_rng(scene.nlos_seed)
    shape = (scene.n_bs, scene.n_r)
    nlos = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return np.sqrt(k / (k + 1.0)) * los + np.sqrt(1.0 / (k + 1.0)) * nlos


def build_channel(scene, phi):
    m = _phi_matrix(phi)
    if m.shape != (scene.n_r, scene.n_r):
        raise DimensionError(f"Phi tiene forma {m.shape}, se esperaba {(scene.n_r, scene.n_r)}")
    a_bs = steering_vector(scene.phi_bs, scene.n_bs, scene.d_bs)
    a_ris_theta = steering_vector(scene.theta, scene.n_r, scene.d_ris)
    a_ris_phi = steering_vector(scene.phi_r, scene.n_r, scene.d_ris)
    a_ris_dot = steering_derivative(scene.theta, scene.n_r, scene.d_ris)
    g_mat = ris_bs_channel(scene, a_bs, a_ris_phi)
    g_phi = g_mat @ m
    return ChannelBundle(
        a_bs=a_bs,
        a_ris_theta=a_ris_theta,
        a_ris_phi=a_ris_phi,
        a_ris_dot=a_ris_dot,
        g_mat=g_mat,
        h=scene.alpha * (g_phi @ a_ris_theta),
        h_dot=scene.alpha * (g_phi @ a_ris_dot),
    )
