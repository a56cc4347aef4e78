"""Doubly-fine material grid evaluation of staggered fields.

Every cell owns sub-cells 'l' in {0, 1}^3. Sub-cell (x, l) takes the
diagonal components of F from the cell x and the off-diagonal component
F_cd from the edge x + l_c e_c + l_d e_d, and is evaluated with the law of
cell x. Diagonal stresses average the sub-cells of their cell, the
off-diagonal stress P_ab at edge x averages the sub-cells
(x - l_a e_a - l_b e_b, l).

Sub-cell states are assembled one offset at a time, a full doubly-fine
grid is never stored. Axes with a single cell only use l = 0.
"""
import itertools
from typing import List, Optional, Tuple

import numpy as np

from combo_fft.materials import TangentOperator

from .material_map import EvaluationStats, MaterialMap

OFF_DIAGONAL = tuple(
    (row, column)
    for row in range(3)
    for column in range(3)
    if row != column
)


def subcell_offsets(dims) -> List[Tuple[int, int, int]]:
    """Sub-cell offsets used on a grid, 8 in 3D and 4 when n3 = 1."""
    choices = [(0, 1) if size > 1 else (0, ) for size in dims]
    return list(itertools.product(*choices))


def _shift(field, row, column, offset, sign):
    shifts = (sign * offset[row], sign * offset[column])
    return np.roll(field, shifts, axis=(row, column))


def assemble_subcell(F: np.ndarray, offset) -> np.ndarray:
    """Full gradients of the sub-cells 'offset' of every cell."""
    result = F.copy()
    for row, column in OFF_DIAGONAL:
        result[..., row, column] = _shift(
            F[..., row, column], row, column, offset, -1
        )
    return result


def scatter_subcell(P: np.ndarray, offset) -> np.ndarray:
    """Move sub-cell stresses to the staggered positions they act on."""
    result = P.copy()
    for row, column in OFF_DIAGONAL:
        result[..., row, column] = _shift(
            P[..., row, column], row, column, offset, 1
        )
    return result


class DfmgTangent(TangentOperator):
    """Tangent of the doubly-fine evaluation.

    Args:
        offsets (List[Tuple[int, int, int]]): Sub-cell offsets.
        tangents (List[TangentOperator]): Cell tangent of every offset.
    """

    def __init__(self, offsets, tangents):
        self._offsets = offsets
        self._tangents = tangents

    def apply(self, dF):
        result = np.zeros_like(dF)
        for offset, tangent in zip(self._offsets, self._tangents):
            local = tangent.apply(assemble_subcell(dF, offset))
            result += scatter_subcell(local, offset)
        return result / len(self._offsets)


def dfmg_evaluate(
    F: np.ndarray, material_map: MaterialMap, tangent: bool = False
) -> Tuple[np.ndarray, Optional[DfmgTangent], EvaluationStats]:
    """Stress, tangent and laminate statistics of a staggered field.

    Args:
        F (np.ndarray): Staggered gradient field (n1, n2, n3, 3, 3).
        material_map (MaterialMap): Materials of the cells.
        tangent (bool): Build the tangent operator.

    Returns:
        Tuple[np.ndarray, Optional[DfmgTangent], EvaluationStats]: Staggered
            stress field, tangent and merged laminate statistics.

    Raises:
        InadmissibleDeformation: det(F) <= 0 in a sub-cell, indices are
            flat indices of the owning cells.

    """
    offsets = subcell_offsets(F.shape[:3])
    P = np.zeros_like(F)
    tangents = []
    stats = EvaluationStats()
    for slot, offset in enumerate(offsets):
        local, local_tangent, local_stats = material_map.evaluate(
            assemble_subcell(F, offset), tangent=tangent, slot=slot
        )
        P += scatter_subcell(local, offset)
        tangents.append(local_tangent)
        stats = stats.merge(local_stats)
    P /= len(offsets)

    dfmg_tangent = DfmgTangent(offsets, tangents) if tangent else None
    return P, dfmg_tangent, stats


def dfmg_stress(F: np.ndarray, material_map: MaterialMap) -> np.ndarray:
    """Staggered stress field of a staggered gradient field."""
    return dfmg_evaluate(F, material_map)[0]
