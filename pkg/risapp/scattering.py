from dataclasses import dataclass

import numpy as np

from .exceptions import ArchitectureError, NotUnitaryError
from .kernels import as_matrix, block_slices, haar_random_unitary

FULLY_CONNECTED = 'fully-connected'
GROUP_CONNECTED = 'group-connected'
SINGLE_CONNECTED = 'single-connected'

UNITARY_TOL = 1e-9
MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class ScatteringMatrix:
    """Matriz de scattering Phi (N_R x N_R) con su arquitectura.

    ``group_size`` = N_R es totalmente conectada, 1 es la RIS convencional
    (diagonal) y cualquier divisor intermedio es la arquitectura por grupos.
    """
    matrix: np.ndarray
    group_size: int

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, 'matrix', m)
        n = m.shape[0]
        g = self.group_size
        if g < 1 or n % g:
            raise ArchitectureError(f"el tamaño de grupo {g} no divide N_R = {n}")
        if g == 1:
            if np.any(m[~np.eye(n, dtype=bool)] != 0):
                raise ArchitectureError("single-connected exige una matriz diagonal")
            worst = np.max(np.abs(np.abs(np.diag(m)) - 1.0))
            if worst > MODULUS_TOL:
                raise NotUnitaryError(f"|Phi_kk| se desvía de 1 en {worst:.3e}")
            return
        mask = block_mask(n, g)
        if np.any(m[~mask] != 0):
            raise ArchitectureError("hay entradas no nulas fuera de los bloques")
        for blk in block_slices(n, g):
            b = m[blk, blk]
            drift = np.linalg.norm(b.conj().T @ b - np.eye(g), 'fro')
            if drift > UNITARY_TOL:
                raise NotUnitaryError(f"bloque no unitario (deriva {drift:.3e})")

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def architecture(self):
        if self.group_size == self.n:
            return FULLY_CONNECTED
        if self.group_size == 1:
            return SINGLE_CONNECTED
        return GROUP_CONNECTED

    def with_global_phase(self, psi):
        return ScatteringMatrix(np.exp(1j * psi) * self.matrix, self.group_size)

    @classmethod
    def fully_connected(cls, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix, matrix.shape[0])

    @classmethod
    def identity(cls, n, group_size=None):
        return cls(np.eye(n, dtype=complex), n if group_size is None else group_size)

    @classmethod
    def random(cls, n, group_size, seed):
        """Bloques Haar independientes; con grupo 1 son fases uniformes."""
        if group_size < 1 or n % group_size:
            raise ArchitectureError(f"el tamaño de grupo {group_size} no divide N_R = {n}")
        rng = np.random.default_rng(seed)
        m = np.zeros((n, n), dtype=complex)
        for blk in block_slices(n, group_size):
            m[blk, blk] = haar_random_unitary(group_size, rng)
        if group_size == 1:
            d = np.diag(m)
            m = np.diag(d / np.abs(d))
        return cls(m, group_size)


def block_mask(n, group_size):
    mask = np.zeros((n, n), dtype=bool)
    for blk in block_slices(n, group_size):
        mask[blk, blk] = True
    return mask
