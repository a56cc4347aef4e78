"""Periodic simulation grid and real-to-complex transforms of fields.

Fields of tensors are stored as (n1, n2, n3, ...) arrays, the tensor
components trail the spatial axes. Transforms act on the three leading
axes and use the half spectrum on the last spatial axis.
"""
from typing import List, Tuple

import attr
import numpy as np
import scipy.fft

from combo_fft.exceptions import ComboError

SPATIAL_AXES = (0, 1, 2)


def _as_dims(value):
    dims = tuple(int(item) for item in value)
    if len(dims) != 3 or min(dims) < 1:
        raise ComboError(f"Grid needs 3 positive dimensions, got {value}")
    return dims


def _as_lengths(value):
    lengths = tuple(float(item) for item in value)
    if len(lengths) != 3 or min(lengths) <= 0.0:
        raise ComboError(f"Grid needs 3 positive lengths, got {value}")
    return lengths


@attr.s(frozen=True)
class SimGrid(object):
    """Regular periodic grid of cells.

    Args:
        dims (Tuple[int, int, int]): Number of cells along axes.
        lengths (Tuple[float, float, float]): Cell edge lengths.
        workers (int): Threads used by transforms.
    """

    dims = attr.ib(converter=_as_dims)
    lengths = attr.ib(default=(1.0, 1.0, 1.0), converter=_as_lengths)
    workers = attr.ib(default=1, converter=int)

    @classmethod
    def from_combo_grid(cls, grid, workers=1) -> "SimGrid":
        return cls(grid.dims, grid.lengths, workers)

    @classmethod
    def from_image(cls, image, workers=1) -> "SimGrid":
        return cls(image.dims, image.lengths, workers)

    @property
    def spacing(self) -> np.ndarray:
        return np.asarray(self.lengths) / np.asarray(self.dims)

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.dims))

    @property
    def spectral_dims(self) -> Tuple[int, int, int]:
        n1, n2, n3 = self.dims
        return n1, n2, n3 // 2 + 1

    def frequencies(self) -> List[np.ndarray]:
        """Angular frequencies xi_j = 2 pi k_j / l_j, broadcastable.

        The last axis holds the non-negative half spectrum.
        """
        result = []
        for axis, (size, length) in enumerate(zip(self.dims, self.lengths)):
            if axis == 2:
                wave = scipy.fft.rfftfreq(size, 1.0 / size)
            else:
                wave = scipy.fft.fftfreq(size, 1.0 / size)
            shape = [1, 1, 1]
            shape[axis] = wave.size
            result.append((2.0 * np.pi * wave / length).reshape(shape))
        return result

    def forward(self, field: np.ndarray) -> np.ndarray:
        """Real-to-complex transform over the spatial axes."""
        return scipy.fft.rfftn(
            field, axes=SPATIAL_AXES, workers=self.workers
        )

    def backward(self, spectrum: np.ndarray) -> np.ndarray:
        """Inverse of 'forward', round trip is the identity."""
        return scipy.fft.irfftn(
            spectrum, s=self.dims, axes=SPATIAL_AXES, workers=self.workers
        )

    def homogeneous(self, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        return np.broadcast_to(value, self.dims + value.shape).copy()

    def cell_centers(self) -> List[np.ndarray]:
        result = []
        for axis, (size, step) in enumerate(zip(self.dims, self.spacing)):
            shape = [1, 1, 1]
            shape[axis] = size
            result.append(((np.arange(size) + 0.5) * step).reshape(shape))
        return result


def field_mean(field: np.ndarray) -> np.ndarray:
    """Cell average of a tensor field."""
    return np.mean(field, axis=SPATIAL_AXES)


def field_norm(field: np.ndarray) -> float:
    """Root mean square of the Frobenius norm over cells."""
    cells = int(np.prod(field.shape[:3]))
    return float(np.sqrt(np.sum(field * field) / cells))


def pin_mean(field: np.ndarray, mean: np.ndarray) -> np.ndarray:
    """Shift a field in place so its cell average equals 'mean'."""
    field += np.asarray(mean) - field_mean(field)
    return field
