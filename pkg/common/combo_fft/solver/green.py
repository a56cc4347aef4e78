"""Green operators of the periodic cell problem.

Every operator is a row-wise projection onto compatible fields built from a
complex gradient symbol g(xi):

    (G tau)_aB = g_aB sum_L conj(g_aL) tau_aL / (alpha sum_L |g_aL|^2)

The zero frequency and modes without gradient are mapped to zero, so the
mean of the polarization is dropped.
"""
import logging
from typing import List, Tuple

import numpy as np

from .config import GreenKind
from .grid import SimGrid

ZERO_SYMBOL = 1e-20

log = logging.getLogger(__name__)


def difference_symbols(
    grid: SimGrid,
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Symbols of forward and backward differences along the axes.

    Returns:
        Tuple[List[np.ndarray], List[np.ndarray]]: (e^{i xi h} - 1) / h and
            (1 - e^{-i xi h}) / h for every axis, broadcastable.

    """
    forward = []
    backward = []
    for xi, step in zip(grid.frequencies(), grid.spacing):
        phase = np.exp(1j * xi * step)
        forward.append((phase - 1.0) / step)
        backward.append((1.0 - np.conj(phase)) / step)
    return forward, backward


def _full(symbol, shape):
    return np.broadcast_to(symbol, shape)


def _nyquist(grid: SimGrid, axis: int) -> np.ndarray:
    size = grid.dims[axis]
    count = grid.spectral_dims[axis]
    mask = np.zeros(count, dtype=bool)
    if size > 1 and size % 2 == 0:
        mask[size // 2] = True
    shape = [1, 1, 1]
    shape[axis] = count
    return mask.reshape(shape)


def gradient_symbols(grid: SimGrid, kind: GreenKind) -> np.ndarray:
    """Gradient symbol g_aB of a discretization.

    Returns:
        np.ndarray: Complex array (k1, k2, k3, 1, 3) for symbols equal in
            all rows, (k1, k2, k3, 3, 3) for the staggered grid.

    """
    kind = GreenKind(kind)
    shape = grid.spectral_dims
    if kind is GreenKind.CONTINUOUS:
        # Nyquist modes use a real symbol so that projected spectra stay
        # hermitian.
        symbol = np.zeros(shape + (1, 3), dtype=complex)
        for axis, xi in enumerate(grid.frequencies()):
            value = np.where(_nyquist(grid, axis), np.abs(xi), 1j * xi)
            symbol[..., 0, axis] = _full(value, shape)
        return symbol

    forward, backward = difference_symbols(grid)
    if kind is GreenKind.ROTATED:
        averages = []
        for xi, step in zip(grid.frequencies(), grid.spacing):
            averages.append(0.5 * (1.0 + np.exp(1j * xi * step)))
        symbol = np.zeros(shape + (1, 3), dtype=complex)
        for axis in range(3):
            value = forward[axis]
            for other in range(3):
                if other != axis:
                    value = value * averages[other]
            symbol[..., 0, axis] = _full(value, shape)
        return symbol

    symbol = np.zeros(shape + (3, 3), dtype=complex)
    for row in range(3):
        for column in range(3):
            if row == column:
                value = forward[column]
            else:
                value = backward[column]
            symbol[..., row, column] = _full(value, shape)
    return symbol


class GreenOperator:
    """Green operator of a reference medium alpha times identity.

    Args:
        grid (SimGrid): Simulation grid.
        kind (GreenKind): Discretization.
        alpha (float): Reference stiffness.
        logger (Optional[logging.Logger]): Logger.

    """

    def __init__(
        self,
        grid: SimGrid,
        kind: GreenKind = GreenKind.CONTINUOUS,
        alpha: float = 1.0,
        logger=None,
    ):
        if logger is None:
            logger = logging.getLogger(self.__class__.__name__)
        self.log = logger
        self._grid = grid
        self._kind = GreenKind(kind)
        self.alpha = alpha

        symbol = gradient_symbols(grid, self._kind)
        norm = np.sum(np.abs(symbol) ** 2, axis=-1)
        largest = float(np.max(norm)) if norm.size else 0.0
        valid = norm > ZERO_SYMBOL * max(largest, 1.0)
        inverse = np.zeros_like(norm)
        inverse[valid] = 1.0 / norm[valid]
        self._symbol = symbol
        self._conj_symbol = np.conj(symbol)
        self._inverse_norm = inverse
        self.log.debug(
            f"Created '{self._kind.value}' Green operator for {grid.dims}"
        )

    @property
    def grid(self) -> SimGrid:
        return self._grid

    @property
    def kind(self) -> GreenKind:
        return self._kind

    @property
    def alpha(self) -> float:
        return self._alpha

    @alpha.setter
    def alpha(self, value: float):
        if not value > 0.0:
            raise ValueError(f"Reference stiffness must be positive: {value}")
        self._alpha = float(value)

    def project_hat(self, tau_hat: np.ndarray) -> np.ndarray:
        """Projection of a spectrum onto compatible fields (alpha = 1)."""
        weights = np.sum(self._conj_symbol * tau_hat, axis=-1)
        return self._symbol * (weights * self._inverse_norm)[..., None]

    def apply_hat(self, tau_hat: np.ndarray) -> np.ndarray:
        return self.project_hat(tau_hat) / self._alpha

    def project(self, field: np.ndarray) -> np.ndarray:
        """Compatible, zero mean part of a real field (n1, n2, n3, 3, 3)."""
        return self._grid.backward(self.project_hat(self._grid.forward(field)))

    def apply(self, field: np.ndarray) -> np.ndarray:
        return self.project(field) / self._alpha


def _green(tau_hat, grid, alpha, kind):
    return GreenOperator(grid, kind, alpha).apply_hat(tau_hat)


def green_continuous(tau_hat, grid: SimGrid, alpha: float) -> np.ndarray:
    """Continuous Green operator acting on a spectrum."""
    return _green(tau_hat, grid, alpha, GreenKind.CONTINUOUS)


def green_rotated(tau_hat, grid: SimGrid, alpha: float) -> np.ndarray:
    """Green operator of rotated centered differences on a spectrum."""
    return _green(tau_hat, grid, alpha, GreenKind.ROTATED)


def green_staggered(tau_hat, grid: SimGrid, alpha: float) -> np.ndarray:
    """Green operator of the staggered grid acting on a spectrum."""
    return _green(tau_hat, grid, alpha, GreenKind.STAGGERED)
