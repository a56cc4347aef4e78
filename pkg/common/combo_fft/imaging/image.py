import os
import logging
from typing import Tuple

import attr
import numpy as np

from combo_fft.exceptions import ArtifactFormatError, ComboError
from combo_fft.utils import (
    create_header,
    store_header,
    load_header,
    sibling_path,
    write_raw,
    read_raw,
)

IMAGE_KIND = "phase_image"
IMAGE_DTYPE = "u1"
HEADER_DTYPE = "u8"
HEADER_ORDER = "C, k fastest"

log = logging.getLogger(__name__)


def _as_indicator(value):
    indicator = np.asarray(value)
    if indicator.ndim != 3:
        raise ComboError(
            f"Phase image must be 3 dimensional, got shape {indicator.shape}"
        )
    if indicator.dtype != np.bool_:
        values = np.unique(indicator)
        if not np.all(np.isin(values, (0, 1))):
            raise ComboError(
                f"Phase image must be binary, found values {values[:5]}"
            )
    return np.ascontiguousarray(indicator, dtype=np.uint8)


def _as_lengths(value):
    lengths = tuple(float(item) for item in value)
    if len(lengths) != 3 or min(lengths) <= 0.0:
        raise ComboError(f"Cell lengths must be 3 positive values: {value}")
    return lengths


@attr.s(eq=False)
class PhaseImage(object):
    """Binary voxel image of a periodic cell.

    Value 1 marks phase + (inclusion), value 0 phase − (matrix). Voxel
    (i, j, k) is centered at ((i + 0.5) h1, (j + 0.5) h2, (k + 0.5) h3).

    Args:
        indicator (np.ndarray): Phase indicator of shape (n1, n2, n3).
        lengths (Tuple[float, float, float]): Cell edge lengths.
    """

    indicator = attr.ib(converter=_as_indicator)
    lengths = attr.ib(default=(1.0, 1.0, 1.0), converter=_as_lengths)

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(int(item) for item in self.indicator.shape)

    @property
    def spacing(self) -> np.ndarray:
        return np.asarray(self.lengths) / np.asarray(self.dims)

    @property
    def voxel_count(self) -> int:
        return int(self.indicator.size)

    @property
    def inclusion_count(self) -> int:
        return int(np.count_nonzero(self.indicator))

    @property
    def volume_fraction(self) -> float:
        """Volume fraction of phase +."""
        return self.inclusion_count / self.voxel_count

    def voxel_centers(self, axis: int) -> np.ndarray:
        return (np.arange(self.dims[axis]) + 0.5) * self.spacing[axis]


def store_image(image: PhaseImage, filepath: str):
    """Store image as JSON header with raw data file next to it.

    Raw data are unsigned bytes in C order with the last index fastest.

    Args:
        image (PhaseImage): Image to store.
        filepath (str): Path to header file.

    """
    raw_path = sibling_path(filepath, "raw")
    header = create_header(
        IMAGE_KIND,
        dims=list(image.dims),
        lengths=list(image.lengths),
        dtype=HEADER_DTYPE,
        order=HEADER_ORDER,
        raw_file=os.path.basename(raw_path),
        volume_fraction=image.volume_fraction,
    )
    write_raw(raw_path, image.indicator, IMAGE_DTYPE)
    store_header(filepath, header)
    log.debug(f"Stored image {image.dims} to '{filepath}'")


def load_image(filepath: str) -> PhaseImage:
    """Load image stored with 'store_image'.

    Raises:
        ArtifactFormatError: Header or raw data are invalid.

    """
    header = load_header(filepath, IMAGE_KIND)
    try:
        dims = tuple(int(item) for item in header["dims"])
        lengths = header["lengths"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactFormatError(filepath, f"invalid header ({exc})")

    if header.get("dtype", HEADER_DTYPE) != HEADER_DTYPE:
        raise ArtifactFormatError(
            filepath, f"unsupported dtype '{header['dtype']}'"
        )
    indicator = read_raw(sibling_path(filepath, "raw"), IMAGE_DTYPE, dims)
    try:
        return PhaseImage(indicator, lengths)
    except ComboError as exc:
        raise ArtifactFormatError(filepath, str(exc))
