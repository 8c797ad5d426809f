"""Primitivas de matrices complejas densas.

Exponencial de matrices anti-hermíticas (vía descomposición espectral de
``jS`` o Padé 13 con escalado y cuadrado), generación de unitarias con
distribución de Haar y re-unitarización por factor polar.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .exceptions import (
    DimensionError, EigenSolverError, NonFiniteError,
    NotSkewHermitianError, SingularMatrixError,
)

logger = logging.getLogger(__name__)

SKEW_TOL = 1e-10
REUNITARIZE_DRIFT = 1e-10
COND_LIMIT = 1e12


@dataclass(frozen=True)
class UnitarityReport:
    frobenius_drift: float
    max_entry_drift: float


@dataclass(frozen=True)
class SpectralFactor:
    """S = V diag(lam) V^H con V unitaria y lam puramente imaginarios."""
    vectors: np.ndarray
    eigenvalues: np.ndarray

    def expm(self, mu):
        if mu == 0:
            return np.broadcast_to(np.eye(self.vectors.shape[-1], dtype=complex),
                                   self.vectors.shape).copy()
        return self._compose(np.exp(mu * self.eigenvalues))

    def reconstruct(self):
        return self._compose(self.eigenvalues)

    def _compose(self, diagonal):
        v = self.vectors
        return (v * diagonal[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def as_matrix(m, square=True):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"se esperaba una matriz 2-D no vacía, forma {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"se esperaba una matriz cuadrada, forma {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("la matriz contiene NaN o Inf")
    return m


def skew_residual(s):
    return float(np.linalg.norm(s + s.conj().T, 'fro'))


def _check_skew(s):
    s = as_matrix(s)
    residual = skew_residual(s)
    if residual > SKEW_TOL * (1.0 + np.linalg.norm(s, 'fro')):
        raise NotSkewHermitianError(f"||S + S^H||_F = {residual:.3e} fuera de tolerancia")
    return s


def expm_skew_via_eigen(s):
    """Factoriza S anti-hermítica a partir de la descomposición hermítica de jS."""
    s = _check_skew(s)
    try:
        w, v = la.eigh(1j * s)
    except la.LinAlgError as exc:
        raise EigenSolverError(f"eigh no convergió: {exc}") from exc
    drift = np.linalg.norm(v.conj().T @ v - np.eye(v.shape[0]), 'fro')
    if not np.isfinite(drift) or drift > 1e-10 * v.shape[0]:
        raise EigenSolverError(f"autovectores no unitarios (deriva {drift:.3e})")
    return SpectralFactor(vectors=v, eigenvalues=-1j * w)


def expm_skew(s, mu, method='spectral'):
    if not np.isfinite(mu):
        raise NonFiniteError(f"paso mu no finito: {mu}")
    if method == 'pade':
        s = _check_skew(s)
        return la.expm(mu * s)
    if method != 'spectral':
        raise ValueError(f"método desconocido: {method}")
    return expm_skew_via_eigen(s).expm(mu)


def haar_random_unitary(n, seed):
    """Unitaria Haar: QR de una matriz gaussiana compleja con corrección de fase.

    ``seed`` puede ser un entero o un ``numpy.random.Generator`` ya creado.
    """
    if n < 1:
        raise DimensionError(f"n debe ser >= 1, se recibió {n}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = la.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def reunitarize(m):
    m = as_matrix(m)
    w, sv, vh = la.svd(m)
    if sv[-1] == 0 or sv[0] / sv[-1] > COND_LIMIT:
        raise SingularMatrixError("matriz singular o mal condicionada, no se puede re-unitarizar")
    return w @ vh


def unitarity_report(m):
    m = as_matrix(m)
    gram = m.conj().T @ m - np.eye(m.shape[0])
    return UnitarityReport(
        frobenius_drift=float(np.linalg.norm(gram, 'fro')),
        max_entry_drift=float(np.max(np.abs(gram))),
    )


def block_slices(n, group_size):
    return [slice(k, k + group_size) for k in range(0, n, group_size)]


def enforce_unitary(m, group_size=None):
    """Re-unitariza (por bloques si hay grupos) cuando la deriva supera el umbral."""
    drift = unitarity_report(m).frobenius_drift
    if drift <= REUNITARIZE_DRIFT:
        return m, False
    logger.debug("deriva de unitariedad %.3e, re-unitarizando", drift)
    if group_size is None or group_size == m.shape[0]:
        return reunitarize(m), True
    fixed = np.zeros_like(m)
    for blk in block_slices(m.shape[0], group_size):
        fixed[blk, blk] = reunitarize(m[blk, blk])
    return fixed, True


def extract_blocks(m, group_size):
    """Bloques diagonales de tamaño ``group_size`` apilados en (nb, g, g)."""
    return np.stack([m[blk, blk] for blk in block_slices(m.shape[0], group_size)])


def assemble_blocks(blocks):
    return la.block_diag(*blocks)


def block_spectral_factor(blocks):
    """Como ``expm_skew_via_eigen`` pero para una pila de bloques anti-hermíticos."""
    blocks = np.asarray(blocks, dtype=complex)
    for b in blocks:
        _check_skew(b)
    try:
        w, v = np.linalg.eigh(1j * blocks)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigh no convergió: {exc}") from exc
    return SpectralFactor(vectors=v, eigenvalues=-1j * w)
