"""Interface tractions on the facets of composite boxels."""
import enum
from typing import List, Sequence, Union

import attr
import numpy as np

from combo_fft.imaging import Facet
from combo_fft.materials import check_admissible
from combo_fft.tensors import inv3

from .recovery import RecoveredFields


class PushForward(enum.Enum):
    """Gradient mapping the material facet to the current one."""

    MIDPOINT = "midpoint"
    PLUS = "plus"
    MINUS = "minus"


@attr.s
class InterfaceSample(object):
    """Traction on the facet of one composite boxel.

    Args:
        index (Tuple[int, int, int]): Boxel index.
        centroid (np.ndarray): Facet centroid in material coordinates.
        normal (np.ndarray): Material unit normal N.
        T_material (np.ndarray): Traction P+ N per material area.
        T_minus (np.ndarray): Traction P− N per material area.
        t_spatial (np.ndarray): Traction per current area.
        area (float): Material facet area.
        area_ratio (float): Current over material area ||J F⁻ᵀ N||.
    """

    index = attr.ib()
    centroid = attr.ib()
    normal = attr.ib()
    T_material = attr.ib()
    T_minus = attr.ib()
    t_spatial = attr.ib()
    area = attr.ib(converter=float)
    area_ratio = attr.ib(converter=float)

    @property
    def spatial_area(self) -> float:
        return self.area * self.area_ratio

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.T_material))

    @property
    def jump(self) -> float:
        """Traction mismatch ||P+ N - P− N||."""
        return float(np.linalg.norm(self.T_material - self.T_minus))


def nanson_ratio(F: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Area ratio ||J F⁻ᵀ N|| of Nanson's relation.

    Raises:
        InadmissibleDeformation: det(F) <= 0.
    """
    jacobian = check_admissible(F)
    inverse = inv3(F)
    # F⁻ᵀ N has components (F⁻¹)_Ji N_J
    mapped = np.einsum("...Ji,...J->...i", inverse, normal)
    return jacobian * np.linalg.norm(mapped, axis=-1)


def interface_tractions(
    recovered: RecoveredFields,
    facets: Sequence[Facet],
    push_forward: Union[PushForward, str] = PushForward.MIDPOINT,
) -> List[InterfaceSample]:
    """Material and spatial tractions on every facet.

    The spatial traction t = P+ N / ||J F⁻ᵀ N|| uses the gradient selected
    by 'push_forward', the midpoint is ½(F+ + F−).

    Args:
        recovered (RecoveredFields): Recovered phase fields.
        facets (Sequence[Facet]): Facets of composite boxels.
        push_forward (Union[PushForward, str]): Gradient of the area map.

    Returns:
        List[InterfaceSample]: One sample per facet.

    Raises:
        KeyError: Facet of a cell that is not composite in the solution.

    """
    push_forward = PushForward(push_forward)
    samples = []
    F_plus = recovered.F_plus.reshape(-1, 3, 3)
    F_minus = recovered.F_minus.reshape(-1, 3, 3)
    P_minus = recovered.P_minus.reshape(-1, 3, 3)
    for facet in facets:
        position = recovered.composite_position(facet.index)
        flat = recovered.composite_indices[position]
        normal = recovered.normals[position]
        if push_forward is PushForward.PLUS:
            F = F_plus[flat]
        elif push_forward is PushForward.MINUS:
            F = F_minus[flat]
        else:
            F = 0.5 * (F_plus[flat] + F_minus[flat])

        T_material = recovered.traction[position]
        ratio = float(nanson_ratio(F, normal))
        samples.append(InterfaceSample(
            index=tuple(facet.index),
            centroid=np.asarray(facet.centroid, dtype=float),
            normal=normal,
            T_material=T_material,
            T_minus=P_minus[flat] @ normal,
            t_spatial=T_material / ratio,
            area=facet.area,
            area_ratio=ratio,
        ))
    return samples
