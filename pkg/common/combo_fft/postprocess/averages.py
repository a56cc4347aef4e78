"""Volume averages and error norms of recovered solutions."""
from typing import Any, Dict, Optional

import attr
import numpy as np

from combo_fft.materials import (
    cauchy_stress,
    green_lagrange_strain,
    von_mises,
)

from .exceptions import ZeroReference
from .recovery import RecoveredFields

# Components of the benchmark tables in their printed order.
TABLE_COMPONENTS = (
    ("XX", (0, 0)),
    ("XY", (0, 1)),
    ("YX", (1, 0)),
    ("YY", (1, 1)),
)


def _as_list(value):
    return None if value is None else np.asarray(value).tolist()


@attr.s
class PhaseAverages(object):
    """Volume averaged stresses of the cell and both phases.

    A phase absent from the cell has no average, its stress is None.

    Args:
        P_bar (np.ndarray): Average stress of the cell.
        P_plus (Optional[np.ndarray]): Average stress of phase +.
        P_minus (Optional[np.ndarray]): Average stress of phase −.
        c_plus (float): Volume fraction of phase +.
    """

    P_bar = attr.ib()
    P_plus = attr.ib(default=None)
    P_minus = attr.ib(default=None)
    c_plus = attr.ib(default=0.0, converter=float)

    @property
    def c_minus(self) -> float:
        return 1.0 - self.c_plus

    def recombined(self) -> np.ndarray:
        """c+ P+ + c− P− which equals the cell average."""
        total = np.zeros((3, 3))
        if self.P_plus is not None:
            total += self.c_plus * self.P_plus
        if self.P_minus is not None:
            total += self.c_minus * self.P_minus
        return total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "P_bar": _as_list(self.P_bar),
            "P_plus": _as_list(self.P_plus),
            "P_minus": _as_list(self.P_minus),
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
        }


def phase_averages(recovered: RecoveredFields) -> PhaseAverages:
    """Phase averages with composite cells split by their fractions."""
    cells = recovered.c_plus.size
    weights_plus = recovered.c_plus.reshape(-1)
    weights_minus = 1.0 - weights_plus
    P_bar = np.mean(recovered.P.reshape(-1, 3, 3), axis=0)

    def _average(stress, weights):
        volume = float(np.sum(weights))
        if volume <= 0.0:
            return None, 0.0
        stress = stress.reshape(-1, 3, 3)
        return np.einsum("n,nij->ij", weights, stress) / volume, volume

    P_plus, volume_plus = _average(recovered.P_plus, weights_plus)
    P_minus, _ = _average(recovered.P_minus, weights_minus)
    return PhaseAverages(
        P_bar=P_bar,
        P_plus=P_plus,
        P_minus=P_minus,
        c_plus=volume_plus / cells,
    )


def error_norm(value, reference) -> float:
    """Relative Frobenius error ||value - reference|| / ||reference||.

    Raises:
        ZeroReference: Reference has zero norm.
    """
    value = np.asarray(value, dtype=float)
    reference = np.asarray(reference, dtype=float)
    norm = float(np.linalg.norm(reference))
    if norm == 0.0:
        raise ZeroReference(norm)
    return float(np.linalg.norm(value - reference)) / norm


def table_components(P_bar) -> Dict[str, float]:
    """In-plane components of a stress as printed in benchmark tables."""
    P_bar = np.asarray(P_bar, dtype=float)
    return {name: float(P_bar[index]) for name, index in TABLE_COMPONENTS}


def from_table_components(
    components: Dict[str, float], fill: Optional[np.ndarray] = None
) -> np.ndarray:
    """Stress tensor of table components, other entries from 'fill'."""
    P_bar = np.zeros((3, 3)) if fill is None else np.array(fill, dtype=float)
    for name, index in TABLE_COMPONENTS:
        P_bar[index] = components[name]
    return P_bar


def _mask_phase(values, mask):
    masked = np.array(values, dtype=float)
    masked[~mask] = np.nan
    return masked


def derived_fields(recovered: RecoveredFields) -> Dict[str, np.ndarray]:
    """Strain and stress measures of the cells and both phases.

    Green-Lagrange strain 'E', Cauchy stress 'sigma' and its von Mises
    equivalent 'von_mises' for the cell, then suffixed '_plus' and
    '_minus' per phase. Phase values are NaN where the phase is absent.
    """
    fields = {}
    for suffix, F, P, mask in (
        ("", recovered.F, recovered.P, None),
        ("_plus", recovered.F_plus, recovered.P_plus, recovered.plus_mask),
        ("_minus", recovered.F_minus, recovered.P_minus,
         recovered.minus_mask),
    ):
        sigma = cauchy_stress(F, P)
        values = {
            "F": F,
            "P": P,
            "E": green_lagrange_strain(F),
            "sigma": sigma,
            "von_mises": von_mises(sigma),
        }
        for name, value in values.items():
            if mask is not None:
                value = _mask_phase(value, mask)
            fields[name + suffix] = value
    return fields
