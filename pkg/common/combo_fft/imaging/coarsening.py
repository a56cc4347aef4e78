import os
import enum
import logging
from typing import Any, Dict, Optional, Sequence, Tuple

import attr
import numpy as np

from combo_fft.exceptions import ArtifactFormatError
from combo_fft.utils import (
    create_header,
    store_header,
    load_header,
    sibling_path,
    write_raw,
    read_raw,
)

from .exceptions import BadCoarseningFactors, NonDividingFactor
from .image import PhaseImage

GRID_KIND = "combo_grid"

log = logging.getLogger(__name__)


class BoxelKind(enum.IntEnum):
    PURE_MATRIX = 0
    PURE_INCLUSION = 1
    COMPOSITE = 2


class NormalFlag(enum.IntFlag):
    """Per boxel flags set by normal identification."""

    NONE = 0
    BARYCENTER_FALLBACK = 1
    DEGENERATE = 2


def _validate_factors(dims, factors) -> Tuple[int, int, int]:
    factors = tuple(int(item) for item in factors)
    if len(factors) != 3:
        raise BadCoarseningFactors(factors)
    for axis, (size, factor) in enumerate(zip(dims, factors)):
        if factor < 1 or size % factor != 0:
            raise NonDividingFactor(axis, size, factor)
    return factors


@attr.s(eq=False)
class ComboGrid(object):
    """Coarse grid of boxels with exact phase counts.

    Args:
        counts (np.ndarray): Inclusion voxel count of every boxel.
        factors (Tuple[int, int, int]): Fine voxels per boxel along axes.
        lengths (Tuple[float, float, float]): Cell edge lengths.
        normals (Optional[np.ndarray]): Normals (N1, N2, N3, 3), zero for
            pure boxels.
        flags (Optional[np.ndarray]): 'NormalFlag' values per boxel.
    """

    counts = attr.ib(converter=lambda value: np.asarray(value, np.int64))
    factors = attr.ib(converter=lambda value: tuple(int(i) for i in value))
    lengths = attr.ib(
        default=(1.0, 1.0, 1.0),
        converter=lambda value: tuple(float(i) for i in value),
    )
    normals = attr.ib(default=None)
    flags = attr.ib(default=None)

    def __attrs_post_init__(self):
        if self.normals is None:
            self.normals = np.zeros(self.counts.shape + (3,))
        if self.flags is None:
            self.flags = np.zeros(self.counts.shape, dtype=np.uint8)

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(int(item) for item in self.counts.shape)

    @property
    def fine_dims(self) -> Tuple[int, int, int]:
        return tuple(
            size * factor for size, factor in zip(self.dims, self.factors)
        )

    @property
    def voxels_per_boxel(self) -> int:
        return int(np.prod(self.factors))

    @property
    def boxel_size(self) -> np.ndarray:
        return np.asarray(self.lengths) / np.asarray(self.dims)

    @property
    def c_plus(self) -> np.ndarray:
        return self.counts / self.voxels_per_boxel

    @property
    def kind(self) -> np.ndarray:
        kind = np.full(self.dims, BoxelKind.COMPOSITE, dtype=np.uint8)
        kind[self.counts == 0] = BoxelKind.PURE_MATRIX
        kind[self.counts == self.voxels_per_boxel] = (
            BoxelKind.PURE_INCLUSION
        )
        return kind

    @property
    def composite_mask(self) -> np.ndarray:
        return (self.counts > 0) & (self.counts < self.voxels_per_boxel)

    @property
    def composite_indices(self) -> np.ndarray:
        """Multi-indices (M, 3) of composite boxels in C order."""
        return np.argwhere(self.composite_mask)

    @property
    def composite_count(self) -> int:
        return int(np.count_nonzero(self.composite_mask))

    @property
    def global_c_plus(self) -> float:
        total = self.voxels_per_boxel * int(np.prod(self.dims))
        return int(np.sum(self.counts)) / total

    @property
    def has_normals(self) -> bool:
        mask = self.composite_mask
        if not np.any(mask):
            return True
        norms = np.linalg.norm(self.normals[mask], axis=-1)
        return bool(np.all(np.abs(norms - 1.0) < 1e-10))

    def with_normals(self, normals, flags=None) -> "ComboGrid":
        """Copy of the grid with normals of composite boxels set.

        Args:
            normals (np.ndarray): Unit normals (M, 3) ordered as
                'composite_indices'.
            flags (Optional[np.ndarray]): Flags (M, ) of the same order.

        """
        mask = self.composite_mask
        full_normals = np.zeros(self.dims + (3,))
        full_normals[mask] = normals
        full_flags = np.zeros(self.dims, dtype=np.uint8)
        if flags is not None:
            full_flags[mask] = flags
        return attr.evolve(self, normals=full_normals, flags=full_flags)


def coarsen(image: PhaseImage, factors: Sequence[int]) -> ComboGrid:
    """Merge blocks of fine voxels into boxels.

    Args:
        image (PhaseImage): Fine phase image.
        factors (Sequence[int]): Fine voxels per boxel along each axis.

    Returns:
        ComboGrid: Grid with exact inclusion counts and no normals.

    Raises:
        NonDividingFactor: A factor does not divide the image dimension.

    """
    factors = _validate_factors(image.dims, factors)
    coarse = tuple(size // factor for size, factor in zip(image.dims, factors))
    blocks = image.indicator.reshape(
        coarse[0], factors[0], coarse[1], factors[1], coarse[2], factors[2]
    )
    counts = blocks.sum(axis=(1, 3, 5), dtype=np.int64)
    grid = ComboGrid(counts, factors, image.lengths)
    log.info(
        f"Coarsened {image.dims} by {factors} to {grid.dims},"
        f" composite boxels: {grid.composite_count}"
    )
    return grid


def block_view(array: np.ndarray, factors: Sequence[int]) -> np.ndarray:
    """View of a fine array as (N1, N2, N3, f1, f2, f3, ...) blocks."""
    f1, f2, f3 = factors
    n1, n2, n3 = array.shape[:3]
    tail = array.shape[3:]
    blocks = array.reshape(
        (n1 // f1, f1, n2 // f2, f2, n3 // f3, f3) + tail
    )
    order = (0, 2, 4, 1, 3, 5) + tuple(range(6, 6 + len(tail)))
    return blocks.transpose(order)


def majority_phases(grid: ComboGrid) -> np.ndarray:
    """Phase of every boxel when composite boxels are not used.

    Composite boxels take the phase with c >= 1/2, ties go to +.

    Returns:
        np.ndarray: True where phase + is assigned.

    """
    return 2 * grid.counts >= grid.voxels_per_boxel


def volume_fraction_report(grid: ComboGrid) -> Dict[str, Any]:
    """Phase volume summary of a coarsening."""
    mask = grid.composite_mask
    composite_c = grid.c_plus[mask]
    boxel_count = int(np.prod(grid.dims))
    majority = majority_phases(grid)
    majority_c_plus = float(np.count_nonzero(majority)) / boxel_count
    report = {
        "dims": list(grid.dims),
        "factors": list(grid.factors),
        "boxel_count": boxel_count,
        "global_c_plus": grid.global_c_plus,
        "composite_count": grid.composite_count,
        "composite_share": grid.composite_count / boxel_count,
        "min_composite_c_plus": None,
        "max_composite_c_plus": None,
        "majority_c_plus": majority_c_plus,
        "majority_error": majority_c_plus - grid.global_c_plus,
    }
    if composite_c.size:
        report["min_composite_c_plus"] = float(composite_c.min())
        report["max_composite_c_plus"] = float(composite_c.max())
    return report


def store_grid(grid: ComboGrid, filepath: str):
    """Store grid as JSON header and raw arrays next to it.

    Raw arrays are 'kind' (u8), 'c_plus' (f64), 'normal' (f64 x 3) and
    'flags' (u8), all in C order.
    """
    arrays = {
        "kind": (grid.kind, "u1"),
        "c_plus": (grid.c_plus, "<f8"),
        "normal": (grid.normals, "<f8"),
        "flags": (grid.flags, "u1"),
    }
    files = {}
    for name, (array, dtype) in arrays.items():
        raw_path = sibling_path(filepath, f"{name}.raw")
        write_raw(raw_path, array, dtype)
        files[name] = os.path.basename(raw_path)

    header = create_header(
        GRID_KIND,
        dims=list(grid.dims),
        factors=list(grid.factors),
        lengths=list(grid.lengths),
        order="C, k fastest",
        files=files,
        composite_count=grid.composite_count,
        global_c_plus=grid.global_c_plus,
    )
    store_header(filepath, header)
    log.debug(f"Stored grid {grid.dims} to '{filepath}'")


def load_grid(filepath: str) -> ComboGrid:
    header = load_header(filepath, GRID_KIND)
    try:
        dims = tuple(int(item) for item in header["dims"])
        factors = tuple(int(item) for item in header["factors"])
        lengths = header["lengths"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactFormatError(filepath, f"invalid header ({exc})")

    c_plus = read_raw(sibling_path(filepath, "c_plus.raw"), "<f8", dims)
    normals = read_raw(
        sibling_path(filepath, "normal.raw"), "<f8", dims + (3, )
    )
    flags_path = sibling_path(filepath, "flags.raw")
    flags: Optional[np.ndarray] = None
    if os.path.exists(flags_path):
        flags = read_raw(flags_path, "u1", dims)

    voxels = int(np.prod(factors))
    counts = np.rint(c_plus * voxels).astype(np.int64)
    if np.any(counts < 0) or np.any(counts > voxels):
        raise ArtifactFormatError(filepath, "c_plus out of range")
    grid = ComboGrid(counts, factors, lengths, normals, flags)

    kind = read_raw(sibling_path(filepath, "kind.raw"), "u1", dims)
    if not np.array_equal(kind, grid.kind):
        raise ArtifactFormatError(
            filepath, "boxel kinds do not match volume fractions"
        )
    return grid
