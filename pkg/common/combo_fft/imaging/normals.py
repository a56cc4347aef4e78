import enum
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.fft
import scipy.ndimage

from combo_fft.tensors import sym_eig3

from .exceptions import DegenerateBarycenters, TooFewInterfaceVoxels
from .image import PhaseImage
from .coarsening import ComboGrid, NormalFlag, block_view
from .shapes import minimal_image

DEGENERATE_TOLERANCE = 1e-12
MIN_INTERFACE_VOXELS = 3

log = logging.getLogger(__name__)


class NormalMethod(enum.Enum):
    BARYCENTER = "barycenter"
    SECOND_MOMENT = "second_moment"


class NormalCentering(enum.Enum):
    """Origin of positions in the second moment tensor."""

    CENTROID = "centroid"
    BOXEL_CENTER = "boxel_center"


class LaplaceMethod(enum.Enum):
    DIRECT = "direct"
    FFT = "fft"


def local_positions(factors: Sequence[int], spacing) -> np.ndarray:
    """Voxel centers (f1, f2, f3, 3) relative to the boxel corner."""
    axes = [
        (np.arange(factor) + 0.5) * step
        for factor, step in zip(factors, spacing)
    ]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def stencil_weights(spacing) -> np.ndarray:
    """Axis weights r_i = h_j h_k / h_i of the Laplacian stencil."""
    h1, h2, h3 = (float(item) for item in spacing)
    return np.array([h2 * h3 / h1, h1 * h3 / h2, h1 * h2 / h3])


def _barycenter_directions(blocks, positions):
    plus = blocks.astype(float)
    voxels = positions[..., 0].size
    count_plus = plus.sum(axis=(1, 2, 3))
    sum_plus = np.einsum("mabc,abcd->md", plus, positions)
    sum_minus = positions.reshape(-1, 3).sum(axis=0) - sum_plus
    center_plus = sum_plus / count_plus[:, None]
    center_minus = sum_minus / (voxels - count_plus)[:, None]
    return center_minus - center_plus


def _extent_axis(block, positions):
    inside = positions[block.astype(bool)]
    extent = inside.max(axis=0) - inside.min(axis=0)
    axis = np.zeros(3)
    axis[int(np.argmax(extent))] = 1.0
    return axis


def boxel_barycenter_normal(block, spacing, index=None) -> np.ndarray:
    """Barycenter normal of a single composite boxel.

    Args:
        block (np.ndarray): Phase indicator of the boxel (f1, f2, f3).
        spacing (Sequence[float]): Fine voxel spacing.
        index (Optional[Tuple[int, int, int]]): Boxel index for messages.

    Returns:
        np.ndarray: Unit normal pointing out of phase +.

    Raises:
        DegenerateBarycenters: Barycenters of both phases coincide.

    """
    block = np.asarray(block)
    positions = local_positions(block.shape, spacing)
    direction = _barycenter_directions(block[None], positions)[0]
    distance = float(np.linalg.norm(direction))
    size = float(np.max(np.asarray(block.shape) * np.asarray(spacing)))
    if distance < DEGENERATE_TOLERANCE * size:
        raise DegenerateBarycenters(distance, index)
    return direction / distance


def normal_barycenter(
    image: PhaseImage, grid: ComboGrid
) -> Tuple[np.ndarray, np.ndarray]:
    """Barycenter normals of all composite boxels.

    The normal points from the barycenter of phase + to the barycenter of
    phase −. Boxels with coinciding barycenters get the axis of largest
    extent of phase + and the 'DEGENERATE' flag.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Normals (M, 3) and flags (M, ) in
            order of 'grid.composite_indices'.

    """
    mask = grid.composite_mask
    blocks = block_view(image.indicator, grid.factors)[mask]
    positions = local_positions(grid.factors, image.spacing)
    directions = _barycenter_directions(blocks, positions)

    distances = np.linalg.norm(directions, axis=-1)
    size = float(np.max(grid.boxel_size))
    degenerate = distances < DEGENERATE_TOLERANCE * size
    flags = np.zeros(len(directions), dtype=np.uint8)
    normals = np.zeros_like(directions)
    valid = ~degenerate
    normals[valid] = directions[valid] / distances[valid, None]
    if np.any(degenerate):
        indices = grid.composite_indices[degenerate]
        log.warning(
            f"{len(indices)} boxels with coinciding phase barycenters,"
            f" first at {tuple(indices[0])}"
        )
        for position in np.flatnonzero(degenerate):
            normals[position] = _extent_axis(blocks[position], positions)
        flags[degenerate] = NormalFlag.DEGENERATE
    return normals, flags


def laplace_weights(
    image: PhaseImage, method: LaplaceMethod = LaplaceMethod.DIRECT
) -> np.ndarray:
    """Interface indicator w = |S * chi| of a phase image.

    The stencil sums uniaxial second differences scaled by the axis weights
    r_i. Convolution wraps periodically.

    Args:
        image (PhaseImage): Phase image.
        method (LaplaceMethod): Direct space or Fourier space convolution.

    Returns:
        np.ndarray: Non-negative weights of shape of the image.

    """
    method = LaplaceMethod(method)
    chi = image.indicator.astype(float)
    ratios = stencil_weights(image.spacing)

    if method is LaplaceMethod.FFT:
        symbol = 0.0
        last = len(image.dims) - 1
        for axis, (size, ratio) in enumerate(zip(image.dims, ratios)):
            if axis == last:
                freq = scipy.fft.rfftfreq(size)
            else:
                freq = scipy.fft.fftfreq(size)
            shape = [1, 1, 1]
            shape[axis] = freq.size
            term = ratio * (2.0 * np.cos(2.0 * np.pi * freq) - 2.0)
            symbol = symbol + term.reshape(shape)
        result = scipy.fft.irfftn(
            scipy.fft.rfftn(chi) * symbol, s=image.dims
        )
        weights = np.abs(result)
        # round-off of the transform
        weights[weights < 1e-10 * float(np.max(ratios))] = 0.0
        return weights

    result = np.zeros_like(chi)
    for axis, (size, ratio) in enumerate(zip(image.dims, ratios)):
        if size == 1:
            continue
        result += ratio * scipy.ndimage.convolve1d(
            chi, [1.0, -2.0, 1.0], axis=axis, mode="wrap"
        )
    return np.abs(result)


def _second_moments(weights, positions, factors, centering):
    total = weights.sum(axis=(1, 2, 3))
    if centering is NormalCentering.CENTROID:
        first = np.einsum("mabc,abcd->md", weights, positions)
        origin = first / np.where(total > 0.0, total, 1.0)[:, None]
    else:
        origin = np.broadcast_to(
            positions.reshape(-1, 3).mean(axis=0), (len(weights), 3)
        )
    centered = positions[None] - origin[:, None, None, None, :]
    moments = np.einsum("mabc,mabcd,mabce->mde", weights, centered, centered)
    moments = 0.5 * (moments + np.swapaxes(moments, -1, -2))

    # flat axes carry no interface information
    trace = np.trace(moments, axis1=-2, axis2=-1)
    for axis, factor in enumerate(factors):
        if factor == 1:
            moments[:, axis, axis] += trace + 1.0
    return moments


def _smallest_eigenvectors(moments):
    _, vectors = sym_eig3(moments)
    return vectors[..., :, 0]


def boxel_second_moment_normal(
    weights,
    spacing,
    reference: Optional[np.ndarray] = None,
    centering: NormalCentering = NormalCentering.CENTROID,
    index=None,
) -> np.ndarray:
    """Second moment normal of a single boxel.

    Args:
        weights (np.ndarray): Interface weights of the boxel (f1, f2, f3).
        spacing (Sequence[float]): Fine voxel spacing.
        reference (Optional[np.ndarray]): Orientation reference, the result
            is flipped to have positive projection on it.
        centering (NormalCentering): Origin of the positions.
        index (Optional[Tuple[int, int, int]]): Boxel index for messages.

    Raises:
        TooFewInterfaceVoxels: Less than three voxels have weight.

    """
    weights = np.asarray(weights, dtype=float)
    count = int(np.count_nonzero(weights > 0.0))
    if count < MIN_INTERFACE_VOXELS:
        raise TooFewInterfaceVoxels(count, index)
    positions = local_positions(weights.shape, spacing)
    moments = _second_moments(
        weights[None], positions, weights.shape, NormalCentering(centering)
    )
    normal = _smallest_eigenvectors(moments)[0]
    if reference is not None and normal @ reference < 0.0:
        normal = -normal
    return normal


def normal_second_moment(
    image: PhaseImage,
    grid: ComboGrid,
    weights: Optional[np.ndarray] = None,
    centering: NormalCentering = NormalCentering.CENTROID,
) -> Tuple[np.ndarray, np.ndarray]:
    """Second moment normals of all composite boxels.

    The normal is the eigenvector of the smallest eigenvalue of the weighted
    second moment tensor of interface voxel positions. It is oriented along
    the barycenter direction so it points out of phase +. Boxels with less
    than three interface voxels use the barycenter normal and get the
    'BARYCENTER_FALLBACK' flag.

    Args:
        image (PhaseImage): Fine phase image.
        grid (ComboGrid): Coarsening of the image.
        weights (Optional[np.ndarray]): Interface weights, computed by
            'laplace_weights' when not passed.
        centering (NormalCentering): Origin of the positions.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Normals (M, 3) and flags (M, ) in
            order of 'grid.composite_indices'.

    """
    centering = NormalCentering(centering)
    if weights is None:
        weights = laplace_weights(image)

    mask = grid.composite_mask
    weight_blocks = block_view(weights, grid.factors)[mask]
    positions = local_positions(grid.factors, image.spacing)
    fallback_normals, flags = normal_barycenter(image, grid)
    blocks = block_view(image.indicator, grid.factors)[mask]
    orientation = _barycenter_directions(blocks, positions)

    counts = np.count_nonzero(weight_blocks > 0.0, axis=(1, 2, 3))
    valid = counts >= MIN_INTERFACE_VOXELS
    normals = fallback_normals.copy()
    if np.any(valid):
        moments = _second_moments(
            weight_blocks[valid], positions, grid.factors, centering
        )
        fitted = _smallest_eigenvectors(moments)
        signs = np.einsum("md,md->m", fitted, orientation[valid])
        fitted[signs < 0.0] *= -1.0
        normals[valid] = fitted

    if not np.all(valid):
        flags[~valid] |= NormalFlag.BARYCENTER_FALLBACK
        log.warning(
            f"{int(np.count_nonzero(~valid))} boxels with less than"
            f" {MIN_INTERFACE_VOXELS} interface voxels use barycenter normals"
        )
    return normals, flags


def compute_normals(
    image: PhaseImage,
    grid: ComboGrid,
    method: NormalMethod = NormalMethod.SECOND_MOMENT,
    centering: NormalCentering = NormalCentering.CENTROID,
    laplace: LaplaceMethod = LaplaceMethod.DIRECT,
) -> ComboGrid:
    """Grid with interface normals of composite boxels set."""
    method = NormalMethod(method)
    if method is NormalMethod.BARYCENTER:
        normals, flags = normal_barycenter(image, grid)
    else:
        weights = laplace_weights(image, laplace)
        normals, flags = normal_second_moment(
            image, grid, weights, centering
        )
    log.info(
        f"Identified {len(normals)} normals with '{method.value}' method"
    )
    return grid.with_normals(normals, flags)


def boxel_centers(grid: ComboGrid, indices: np.ndarray) -> np.ndarray:
    return (np.asarray(indices) + 0.5) * grid.boxel_size


def interface_centroids(
    image: PhaseImage,
    grid: ComboGrid,
    weights: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Interface weighted centroids (M, 3) of composite boxels.

    Boxels without interface weight use their center.
    """
    if weights is None:
        weights = laplace_weights(image)
    weight_blocks = block_view(weights, grid.factors)[grid.composite_mask]
    positions = local_positions(grid.factors, image.spacing)
    total = weight_blocks.sum(axis=(1, 2, 3))
    first = np.einsum("mabc,abcd->md", weight_blocks, positions)
    local = np.where(
        (total > 0.0)[:, None],
        first / np.where(total > 0.0, total, 1.0)[:, None],
        0.5 * grid.boxel_size,
    )
    return grid.composite_indices * grid.boxel_size + local


def radial_normals(
    grid: ComboGrid,
    center=None,
    positions: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Outward radial directions of a spherical inclusion.

    Evaluated at 'positions' (M, 3) when passed, e.g. the interface
    centroids, otherwise at composite boxel centers.
    """
    lengths = np.asarray(grid.lengths)
    if center is None:
        center = 0.5 * lengths
    if positions is None:
        positions = boxel_centers(grid, grid.composite_indices)
    delta = minimal_image(np.asarray(positions) - np.asarray(center), lengths)
    return delta / np.linalg.norm(delta, axis=-1, keepdims=True)


def colinearity(normals, reference) -> np.ndarray:
    """Projection N . N0 of unit normals on reference normals."""
    return np.einsum("...d,...d->...", normals, reference)
