"""Recovery of phase-wise fields inside composite boxels.

Composite boxels are revisited with the converged boxel gradient and the
jump vectors the solver used last. From that warm start the laminate solve
needs at most one more iteration, so recovery only reads solver state and
gives the same store when repeated.
"""
import logging
from typing import Optional, Tuple

import attr
import numpy as np

from combo_fft.laminate import NoConvergence
from combo_fft.materials import InadmissibleDeformation
from combo_fft.solver import MaterialMap

log = logging.getLogger(__name__)


@attr.s
class RecoveredFields(object):
    """Phase-wise state of every cell of a solution.

    Pure cells carry their own state in both phase slots, 'plus_mask' and
    'minus_mask' tell where a phase is present.

    Args:
        F (np.ndarray): Cell gradients (n1, n2, n3, 3, 3).
        P (np.ndarray): Cell stresses (n1, n2, n3, 3, 3).
        c_plus (np.ndarray): Volume fraction of phase + per cell.
        F_plus (np.ndarray): Gradients of phase +.
        F_minus (np.ndarray): Gradients of phase −.
        P_plus (np.ndarray): Stresses of phase +.
        P_minus (np.ndarray): Stresses of phase −.
        composite_indices (np.ndarray): Flat indices of composite cells.
        normals (np.ndarray): Normals of composite cells (m, 3).
        jumps (np.ndarray): Jump vectors of composite cells (m, 3).
        traction (np.ndarray): Interface traction P+ N (m, 3).
        iterations (np.ndarray): Laminate iterations of the re-solve.
        residual (np.ndarray): Final traction residual norms.
    """

    F = attr.ib()
    P = attr.ib()
    c_plus = attr.ib()
    F_plus = attr.ib()
    F_minus = attr.ib()
    P_plus = attr.ib()
    P_minus = attr.ib()
    composite_indices = attr.ib(factory=lambda: np.zeros(0, dtype=int))
    normals = attr.ib(factory=lambda: np.zeros((0, 3)))
    jumps = attr.ib(factory=lambda: np.zeros((0, 3)))
    traction = attr.ib(factory=lambda: np.zeros((0, 3)))
    iterations = attr.ib(factory=lambda: np.zeros(0, dtype=int))
    residual = attr.ib(factory=lambda: np.zeros(0))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(int(item) for item in self.c_plus.shape)

    @property
    def plus_mask(self) -> np.ndarray:
        return self.c_plus > 0.0

    @property
    def minus_mask(self) -> np.ndarray:
        return self.c_plus < 1.0

    @property
    def composite_count(self) -> int:
        return int(self.composite_indices.size)

    def composite_position(self, index) -> int:
        """Row of cell 'index' (tuple or flat) in the composite arrays.

        Raises:
            KeyError: Cell is not composite.
        """
        if not np.isscalar(index):
            index = int(np.ravel_multi_index(tuple(index), self.dims))
        position = int(np.searchsorted(self.composite_indices, index))
        if (
            position >= self.composite_indices.size
            or self.composite_indices[position] != index
        ):
            raise KeyError(f"Cell {index} is not a composite boxel")
        return position

    def equals(self, other: "RecoveredFields") -> bool:
        """Exact equality of all arrays."""
        return all(
            np.array_equal(
                getattr(self, field.name), getattr(other, field.name)
            )
            for field in attr.fields(RecoveredFields)
        )


def recover_phase_fields(
    F: np.ndarray,
    material_map: MaterialMap,
    slot: int = 0,
    logger: Optional[logging.Logger] = None,
) -> RecoveredFields:
    """Phase-wise gradients and stresses of a converged field.

    Staggered fields are recovered at their cell values, which is the first
    sub-cell of the doubly-fine evaluation.

    Args:
        F (np.ndarray): Converged gradient field (n1, n2, n3, 3, 3).
        material_map (MaterialMap): Materials used by the solver.
        slot (int): Laminate warm start slot to start from.
        logger (Optional[logging.Logger]): Logger.

    Returns:
        RecoveredFields: Phase-wise state of all cells.

    Raises:
        InadmissibleDeformation: det(F) <= 0 in a pure cell.
        InadmissibleMacroState: det(F) <= 0 in a composite cell.
        NoConvergence: Laminate problem of a composite cell failed,
            'best_state' holds the cell index and its best jump vector.

    """
    logger = logger or log
    F = np.asarray(F, dtype=float)
    dims = tuple(int(item) for item in F.shape[:3])
    if dims != material_map.dims:
        raise ValueError(
            f"Field of shape {dims} does not match material map"
            f" {material_map.dims}"
        )

    flat = F.reshape(-1, 3, 3)
    c_plus = material_map.cell_fractions().reshape(-1)
    P = np.empty_like(flat)
    for law, mask in (
        (material_map.law_plus, c_plus == 1.0),
        (material_map.law_minus, c_plus == 0.0),
    ):
        indices = np.flatnonzero(mask)
        if indices.size == 0:
            continue
        try:
            P[indices] = law.stress(flat[indices])
        except InadmissibleDeformation as exc:
            raise InadmissibleDeformation(indices[exc.indices], exc.min_det)

    F_plus, F_minus = flat.copy(), flat.copy()
    P_plus, P_minus = P.copy(), P.copy()
    composite = material_map.composite_indices
    if composite.size == 0:
        return RecoveredFields(
            F=F.copy(),
            P=P.reshape(F.shape),
            c_plus=c_plus.reshape(dims),
            F_plus=F_plus.reshape(F.shape),
            F_minus=F_minus.reshape(F.shape),
            P_plus=P_plus.reshape(F.shape),
            P_minus=P_minus.reshape(F.shape),
        )

    warm_start = material_map.warm_start(slot)
    if warm_start is not None:
        warm_start = warm_start.copy()
    batch = material_map.laminate.solve(
        flat[composite],
        material_map.composite_normals,
        material_map.composite_c_plus,
        a0=warm_start,
        tangent=False,
    )
    if batch.failed_count:
        row = int(np.flatnonzero(~batch.converged)[0])
        index = tuple(
            int(item) for item in np.unravel_index(composite[row], dims)
        )
        raise NoConvergence(
            int(batch.iterations[row]),
            float(batch.residual[row]),
            best_state={"boxel": index, "state": batch.state_at(row)},
        )
    logger.debug(
        f"Recovered {batch.count} composite boxels"
        f" (max {int(np.max(batch.iterations))} iterations)"
    )

    F_plus[composite] = batch.F_plus
    F_minus[composite] = batch.F_minus
    P_plus[composite] = batch.P_plus
    P_minus[composite] = batch.P_minus
    P[composite] = batch.P_box
    return RecoveredFields(
        F=F.copy(),
        P=P.reshape(F.shape),
        c_plus=c_plus.reshape(dims),
        F_plus=F_plus.reshape(F.shape),
        F_minus=F_minus.reshape(F.shape),
        P_plus=P_plus.reshape(F.shape),
        P_minus=P_minus.reshape(F.shape),
        composite_indices=composite.copy(),
        normals=material_map.composite_normals.copy(),
        jumps=batch.a,
        traction=np.einsum(
            "niJ,nJ->ni", batch.P_plus, material_map.composite_normals
        ),
        iterations=batch.iterations,
        residual=batch.residual,
    )
