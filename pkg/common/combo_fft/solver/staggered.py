"""Finite differences of the staggered grid.

Diagonal components of a deformation gradient sit in cell centers, the
off-diagonal ones on edge midpoints. Displacement component u_a lives on
the faces normal to axis a.

    (Grad u)_aa = D+_a u_a,  (Grad u)_aB = D-_B u_a  (B != a)
    (Div P)_a = D-_a P_aa + sum_{B != a} D+_B P_aB

so that <Grad u, P> = -<u, Div P>.
"""
from typing import List

import attr
import numpy as np

from .grid import SimGrid
from .green import difference_symbols


def forward_difference(field, axis: int, step: float) -> np.ndarray:
    """D+ f = (f[x + e] - f[x]) / h with periodic wrap."""
    return (np.roll(field, -1, axis=axis) - field) / step


def backward_difference(field, axis: int, step: float) -> np.ndarray:
    """D- f = (f[x] - f[x - e]) / h with periodic wrap."""
    return (field - np.roll(field, 1, axis=axis)) / step


def staggered_gradient(u: np.ndarray, grid: SimGrid) -> np.ndarray:
    """Gradient of a displacement field (n1, n2, n3, 3)."""
    result = np.empty(u.shape[:3] + (3, 3))
    for row in range(3):
        for column in range(3):
            step = grid.spacing[column]
            if row == column:
                value = forward_difference(u[..., row], column, step)
            else:
                value = backward_difference(u[..., row], column, step)
            result[..., row, column] = value
    return result


def staggered_divergence(P: np.ndarray, grid: SimGrid) -> np.ndarray:
    """Divergence of a stress field (n1, n2, n3, 3, 3), second index."""
    result = np.zeros(P.shape[:3] + (3,))
    for row in range(3):
        for column in range(3):
            step = grid.spacing[column]
            if row == column:
                value = backward_difference(P[..., row, column], column, step)
            else:
                value = forward_difference(P[..., row, column], column, step)
            result[..., row] += value
    return result


@attr.s(frozen=True)
class StaggeredOperators(object):
    """Fourier symbols of the staggered differences of a grid.

    Args:
        grid (SimGrid): Simulation grid.
        forward (List[np.ndarray]): Symbols of D+ per axis.
        backward (List[np.ndarray]): Symbols of D- per axis.
    """

    grid = attr.ib()
    forward = attr.ib()
    backward = attr.ib()

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return staggered_gradient(u, self.grid)

    def divergence(self, P: np.ndarray) -> np.ndarray:
        return staggered_divergence(P, self.grid)

    def gradient_symbol(self) -> List[List[np.ndarray]]:
        """Symbol of Grad as nested rows of broadcastable arrays."""
        return [
            [
                self.forward[column] if row == column
                else self.backward[column]
                for column in range(3)
            ]
            for row in range(3)
        ]


def staggered_operators(grid: SimGrid) -> StaggeredOperators:
    forward, backward = difference_symbols(grid)
    return StaggeredOperators(grid, forward, backward)
