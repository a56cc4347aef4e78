"""Assignment of material laws to the cells of the simulation grid.

Cells are pure phase + or − or composite boxels. Composite boxels are
evaluated by the laminate kernel with jump vectors kept as warm starts
between evaluations.
"""
import logging
from typing import Dict, List, Optional, Tuple

import attr
import numpy as np

from combo_fft.exceptions import ComboError
from combo_fft.materials import (
    InadmissibleDeformation,
    MaterialLaw,
    TangentOperator,
    DenseTangent,
)
from combo_fft.laminate import LaminateSolver, LaminateTolerance
from combo_fft.imaging import BoxelKind, ComboGrid, PhaseImage
from combo_fft.imaging import majority_phases


@attr.s
class EvaluationStats(object):
    """Laminate statistics of one material evaluation."""

    composite_count = attr.ib(default=0)
    max_iterations = attr.ib(default=0)
    back_projections = attr.ib(default=0)
    failed = attr.ib(default=0)

    def merge(self, other: "EvaluationStats") -> "EvaluationStats":
        return EvaluationStats(
            composite_count=max(self.composite_count, other.composite_count),
            max_iterations=max(self.max_iterations, other.max_iterations),
            back_projections=self.back_projections + other.back_projections,
            failed=max(self.failed, other.failed),
        )


class CellTangent(TangentOperator):
    """Tangent of a field, applied group by group of cells.

    Args:
        groups (List[Tuple[np.ndarray, TangentOperator]]): Flat cell indices
            with the tangent operator of those cells.
    """

    def __init__(self, groups: List[Tuple[np.ndarray, TangentOperator]]):
        self._groups = groups

    def apply(self, dF):
        flat = dF.reshape(-1, 3, 3)
        result = np.zeros_like(flat)
        for indices, operator in self._groups:
            result[indices] = operator.apply(flat[indices])
        return result.reshape(dF.shape)


class MaterialMap:
    """Material laws of all cells of a grid.

    Args:
        kind (np.ndarray): 'BoxelKind' of every cell (n1, n2, n3).
        law_plus (MaterialLaw): Law of phase +.
        law_minus (MaterialLaw): Law of phase −.
        normals (Optional[np.ndarray]): Normals (n1, n2, n3, 3) of
            composite cells.
        c_plus (Optional[np.ndarray]): Volume fractions (n1, n2, n3) of
            composite cells.
        tolerance (Optional[LaminateTolerance]): Laminate settings.
        logger (Optional[logging.Logger]): Logger.

    """

    def __init__(
        self,
        kind: np.ndarray,
        law_plus: MaterialLaw,
        law_minus: MaterialLaw,
        normals: Optional[np.ndarray] = None,
        c_plus: Optional[np.ndarray] = None,
        tolerance: Optional[LaminateTolerance] = None,
        logger=None,
    ):
        if logger is None:
            logger = logging.getLogger(self.__class__.__name__)
        self.log = logger

        kind = np.asarray(kind)
        self._dims = tuple(int(item) for item in kind.shape)
        flat_kind = kind.reshape(-1)
        self._law_plus = law_plus
        self._law_minus = law_minus
        self._plus = np.flatnonzero(flat_kind == BoxelKind.PURE_INCLUSION)
        self._minus = np.flatnonzero(flat_kind == BoxelKind.PURE_MATRIX)
        self._composite = np.flatnonzero(flat_kind == BoxelKind.COMPOSITE)

        self._normals = np.zeros((0, 3))
        self._c_plus = np.zeros(0)
        if self._composite.size:
            if normals is None or c_plus is None:
                raise ComboError(
                    "Composite cells need normals and volume fractions"
                )
            self._normals = np.asarray(normals).reshape(-1, 3)[
                self._composite
            ]
            self._c_plus = np.asarray(c_plus).reshape(-1)[self._composite]

        self._laminate = LaminateSolver(
            law_plus, law_minus, tolerance, logger=self.log
        )
        self._jumps: Dict[int, np.ndarray] = {}

    @classmethod
    def from_grid(
        cls,
        grid: ComboGrid,
        law_plus: MaterialLaw,
        law_minus: MaterialLaw,
        combo: bool = True,
        tolerance: Optional[LaminateTolerance] = None,
        logger=None,
    ) -> "MaterialMap":
        """Materials of a boxel grid.

        Without composite boxels each composite boxel takes the phase with
        volume fraction of at least one half, ties go to +.
        """
        if not combo:
            kind = np.where(
                majority_phases(grid),
                BoxelKind.PURE_INCLUSION,
                BoxelKind.PURE_MATRIX,
            )
            return cls(kind, law_plus, law_minus, logger=logger)

        if not grid.has_normals:
            raise ComboError("Composite boxels of the grid have no normals")
        return cls(
            grid.kind,
            law_plus,
            law_minus,
            normals=grid.normals,
            c_plus=grid.c_plus,
            tolerance=tolerance,
            logger=logger,
        )

    @classmethod
    def from_image(
        cls,
        image: PhaseImage,
        law_plus: MaterialLaw,
        law_minus: MaterialLaw,
        logger=None,
    ) -> "MaterialMap":
        kind = np.where(
            image.indicator == 1,
            BoxelKind.PURE_INCLUSION,
            BoxelKind.PURE_MATRIX,
        )
        return cls(kind, law_plus, law_minus, logger=logger)

    @classmethod
    def homogeneous(cls, dims, law: MaterialLaw, logger=None):
        kind = np.full(tuple(dims), BoxelKind.PURE_MATRIX, dtype=np.uint8)
        return cls(kind, law, law, logger=logger)

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self._dims

    @property
    def composite_count(self) -> int:
        return int(self._composite.size)

    @property
    def composite_indices(self) -> np.ndarray:
        """Flat cell indices of composite cells."""
        return self._composite

    @property
    def composite_normals(self) -> np.ndarray:
        return self._normals

    @property
    def composite_c_plus(self) -> np.ndarray:
        return self._c_plus

    @property
    def law_plus(self) -> MaterialLaw:
        return self._law_plus

    @property
    def law_minus(self) -> MaterialLaw:
        return self._law_minus

    @property
    def laminate(self) -> LaminateSolver:
        return self._laminate

    def warm_start(self, slot: int = 0) -> Optional[np.ndarray]:
        """Jump vectors of the last evaluation in 'slot', if any."""
        return self._jumps.get(slot)

    @property
    def plus_fraction(self) -> float:
        """Volume fraction of phase + seen by the solver."""
        total = self._plus.size + float(np.sum(self._c_plus))
        return total / int(np.prod(self._dims))

    def cell_fractions(self) -> np.ndarray:
        """Volume fraction of phase + of every cell (n1, n2, n3)."""
        fractions = np.zeros(int(np.prod(self._dims)))
        fractions[self._plus] = 1.0
        fractions[self._composite] = self._c_plus
        return fractions.reshape(self._dims)

    def laws(self) -> List[MaterialLaw]:
        """Laws present in the cells."""
        laws = []
        if self._plus.size or self._composite.size:
            laws.append(self._law_plus)
        if self._minus.size or self._composite.size:
            laws.append(self._law_minus)
        return laws

    def snapshot(self) -> Dict[int, np.ndarray]:
        """Copy of the laminate warm starts."""
        return {key: value.copy() for key, value in self._jumps.items()}

    def restore(self, snapshot: Dict[int, np.ndarray]):
        self._jumps = {key: value.copy() for key, value in snapshot.items()}

    def _evaluate_phase(self, law, flat, indices, tangent, P, groups):
        if indices.size == 0:
            return
        try:
            if tangent:
                stress, operator = law.linearize(flat[indices])
                groups.append((indices, operator))
            else:
                stress = law.stress(flat[indices])
        except InadmissibleDeformation as exc:
            raise InadmissibleDeformation(
                indices[exc.indices], exc.min_det
            )
        P[indices] = stress

    def evaluate(
        self, F: np.ndarray, tangent: bool = False, slot: int = 0
    ) -> Tuple[np.ndarray, Optional[CellTangent], EvaluationStats]:
        """Stress of every cell and optionally the tangent operator.

        Args:
            F (np.ndarray): Deformation gradients (n1, n2, n3, 3, 3).
            tangent (bool): Build the tangent operator.
            slot (int): Warm start slot of the laminate jump vectors.

        Returns:
            Tuple[np.ndarray, Optional[CellTangent], EvaluationStats]: Stress
                field, tangent and laminate statistics.

        Raises:
            InadmissibleDeformation: det(F) <= 0 in a pure cell, indices
                are flat cell indices.
            InadmissibleMacroState: det(F) <= 0 in a composite cell.

        """
        flat = F.reshape(-1, 3, 3)
        P = np.empty_like(flat)
        groups = []
        self._evaluate_phase(
            self._law_plus, flat, self._plus, tangent, P, groups
        )
        self._evaluate_phase(
            self._law_minus, flat, self._minus, tangent, P, groups
        )

        stats = EvaluationStats()
        if self._composite.size:
            batch = self._laminate.solve(
                flat[self._composite],
                self._normals,
                self._c_plus,
                a0=self._jumps.get(slot),
                tangent=tangent,
            )
            self._jumps[slot] = batch.a
            P[self._composite] = batch.P_box
            if tangent:
                groups.append((self._composite, DenseTangent(batch.A_box)))
            stats = EvaluationStats(
                composite_count=batch.count,
                max_iterations=int(np.max(batch.iterations)),
                back_projections=int(np.sum(batch.back_projections)),
                failed=batch.failed_count,
            )

        cell_tangent = CellTangent(groups) if tangent else None
        return P.reshape(F.shape), cell_tangent, stats
