"""Analytic periodic geometries rasterized on voxel centers."""
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .exceptions import BadShapeSpec
from .image import PhaseImage

log = logging.getLogger(__name__)

AXIS_NAMES = {"x": 0, "y": 1, "z": 2}


def _validate_dims(dims):
    try:
        dims = tuple(int(item) for item in dims)
    except (TypeError, ValueError):
        raise BadShapeSpec("dims", f"expected 3 integers, got {dims}")
    if len(dims) != 3 or min(dims) < 1:
        raise BadShapeSpec("dims", f"expected 3 positive integers: {dims}")
    return dims


def cell_coordinates(dims, lengths):
    """Broadcastable voxel center coordinates of a periodic cell."""
    coords = []
    for axis, (size, length) in enumerate(zip(dims, lengths)):
        shape = [1, 1, 1]
        shape[axis] = size
        values = (np.arange(size) + 0.5) * (length / size)
        coords.append(values.reshape(shape))
    return coords


def minimal_image(delta, length):
    """Shortest periodic representative of a coordinate difference."""
    return delta - length * np.round(delta / length)


def _center(center, lengths):
    if center is None:
        return 0.5 * np.asarray(lengths, dtype=float)
    center = np.asarray(center, dtype=float)
    if center.shape != (3,):
        raise BadShapeSpec("center", f"expected 3 values, got {center}")
    return center


def _axis_vector(axis):
    if isinstance(axis, str):
        if axis.lower() not in AXIS_NAMES:
            raise BadShapeSpec("fiber", f"unknown axis '{axis}'")
        axis = AXIS_NAMES[axis.lower()]
    if isinstance(axis, (int, np.integer)):
        if not 0 <= axis < 3:
            raise BadShapeSpec("fiber", f"axis index out of range: {axis}")
        vector = np.zeros(3)
        vector[axis] = 1.0
        return vector
    vector = np.asarray(axis, dtype=float).reshape(-1)
    norm = np.linalg.norm(vector)
    if vector.shape != (3,) or norm == 0.0:
        raise BadShapeSpec("fiber", f"invalid axis {axis}")
    return vector / norm


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rotation about 'axis' by 'angle' in degrees (Rodrigues formula)."""
    axis = _axis_vector(axis)
    theta = np.deg2rad(angle)
    skew = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return (
        np.eye(3)
        + np.sin(theta) * skew
        + (1.0 - np.cos(theta)) * skew @ skew
    )


def sphere(coords, lengths, radius: float, center=None) -> np.ndarray:
    if radius < 0.0:
        raise BadShapeSpec("sphere", f"negative radius {radius}")
    center = _center(center, lengths)
    distance = 0.0
    for axis in range(3):
        delta = minimal_image(coords[axis] - center[axis], lengths[axis])
        distance = distance + delta * delta
    return distance < radius * radius


def octahedron(coords, lengths, radius: float, center=None) -> np.ndarray:
    if radius < 0.0:
        raise BadShapeSpec("octahedron", f"negative radius {radius}")
    center = _center(center, lengths)
    distance = 0.0
    for axis in range(3):
        delta = minimal_image(coords[axis] - center[axis], lengths[axis])
        distance = distance + np.abs(delta)
    return distance < radius


def _cylinder(coords, lengths, center, direction, radius, length):
    deltas = [
        minimal_image(coords[axis] - center[axis], lengths[axis])
        for axis in range(3)
    ]
    along = sum(deltas[axis] * direction[axis] for axis in range(3))
    squared = sum(delta * delta for delta in deltas)
    inside = (squared - along * along) < radius * radius
    if length is not None:
        inside &= np.abs(along) <= 0.5 * length
    return inside


def fiber(
    coords,
    lengths,
    axis,
    radius: float,
    length: Optional[float] = None,
    center=None,
) -> np.ndarray:
    """Circular fiber, infinite along 'axis' when 'length' is not set.

    An infinite fiber must follow one of the cell axes so it stays periodic.
    """
    if radius <= 0.0:
        raise BadShapeSpec("fiber", f"radius must be positive: {radius}")
    direction = _axis_vector(axis)
    center = _center(center, lengths)
    if length is None:
        if np.count_nonzero(direction) != 1:
            raise BadShapeSpec(
                "fiber", "infinite fiber must be aligned with a cell axis"
            )
    elif length <= 0.0:
        raise BadShapeSpec("fiber", f"length must be positive: {length}")
    return _cylinder(coords, lengths, center, direction, radius, length)


def cross_ply(
    coords,
    lengths,
    radius: float = 0.2,
    spacing: float = 0.5,
    plies: int = 2,
    rotation_axis=None,
    rotation_angle: float = 0.0,
) -> np.ndarray:
    """Cross-ply laminate of fiber rows in unit-cell coordinates.

    Plies are stacked along the third frame axis. Fibers of even plies run
    along the first axis, of odd plies along the second axis. Each ply
    holds one row of fibers at 'spacing'. The optional rotation turns the
    ply frame about the cell center.
    """
    row_count = 1.0 / spacing
    if spacing <= 0.0 or abs(row_count - round(row_count)) > 1e-9:
        raise BadShapeSpec(
            "cross_ply", f"spacing must divide the unit cell: {spacing}"
        )
    if plies < 1:
        raise BadShapeSpec("cross_ply", f"invalid ply count {plies}")
    thickness = 1.0 / plies
    if not 0.0 < radius <= 0.5 * min(spacing, thickness):
        raise BadShapeSpec(
            "cross_ply",
            f"radius {radius} must be positive and fit into ply and row"
        )

    unit = [coords[axis] / lengths[axis] - 0.5 for axis in range(3)]
    if rotation_axis is not None and rotation_angle:
        rotation = rotation_matrix(rotation_axis, rotation_angle)
        # frame coordinates are R^T (x - center)
        unit = [
            sum(rotation[row, axis] * unit[row] for row in range(3))
            for axis in range(3)
        ]
    unit = [np.mod(item + 0.5, 1.0) for item in unit]

    ply_index = np.floor(unit[2] / thickness).astype(int)
    ply_center = (ply_index + 0.5) * thickness
    stack_distance = unit[2] - ply_center
    transverse = np.where(ply_index % 2 == 0, unit[1], unit[0])
    offset = np.mod(transverse - 0.5 * spacing, spacing)
    row_distance = np.minimum(offset, spacing - offset)
    return (
        row_distance * row_distance + stack_distance * stack_distance
        < radius * radius
    )


def fiber_pack(
    coords,
    lengths,
    seed: int,
    count: int,
    radius: float,
    length: float,
    orientation_spread: float = 0.0,
    axis="x",
) -> np.ndarray:
    """Randomly placed short fibers, overlaps allowed.

    Fiber directions deviate from 'axis' by a tilt angle drawn uniformly
    from [0, orientation_spread] degrees.
    """
    if count < 0:
        raise BadShapeSpec("fiber_pack", f"negative fiber count {count}")
    if radius <= 0.0 or length <= 0.0:
        raise BadShapeSpec(
            "fiber_pack", "radius and length must be positive"
        )
    if length + 2.0 * radius > min(lengths):
        raise BadShapeSpec(
            "fiber_pack", "fibers must be shorter than the smallest cell edge"
        )

    rng = np.random.default_rng(seed)
    main = _axis_vector(axis)
    helper = np.eye(3)[np.argmin(np.abs(main))]
    first = np.cross(main, helper)
    first /= np.linalg.norm(first)
    second = np.cross(main, first)

    centers = rng.random((count, 3)) * np.asarray(lengths)
    tilts = np.deg2rad(rng.uniform(0.0, orientation_spread, count))
    turns = rng.uniform(0.0, 2.0 * np.pi, count)

    inside = np.zeros(tuple(item.size for item in coords), dtype=bool)
    for center, tilt, turn in zip(centers, tilts, turns):
        direction = (
            np.cos(tilt) * main
            + np.sin(tilt) * (np.cos(turn) * first + np.sin(turn) * second)
        )
        inside |= _cylinder(
            coords, lengths, center, direction, radius, length
        )
    return inside


def plane(coords, lengths, normal, point=None) -> np.ndarray:
    """Half-space behind a plane, normal points out of the inclusion.

    Not wrapped, the plane cuts the cell once.
    """
    normal = np.asarray(normal, dtype=float)
    norm = np.linalg.norm(normal)
    if normal.shape != (3,) or norm == 0.0:
        raise BadShapeSpec("plane", f"invalid normal {normal}")
    normal = normal / norm
    point = _center(point, lengths)
    signed = sum(
        (coords[axis] - point[axis]) * normal[axis] for axis in range(3)
    )
    return signed < 0.0


SHAPE_GENERATORS = {
    "sphere": sphere,
    "octahedron": octahedron,
    "fiber": fiber,
    "cross_ply": cross_ply,
    "fiber_pack": fiber_pack,
    "plane": plane,
}


def generate(
    shape: Dict[str, Any],
    dims: Sequence[int],
    lengths: Sequence[float] = (1.0, 1.0, 1.0),
) -> PhaseImage:
    """Rasterize an analytic geometry.

    A voxel belongs to the inclusion when its center lies inside the solid.

    Args:
        shape (Dict[str, Any]): Shape name under 'shape' key and keyword
            arguments of the generator function.
        dims (Sequence[int]): Image dimensions.
        lengths (Sequence[float]): Cell edge lengths.

    Returns:
        PhaseImage: Generated image.

    Raises:
        BadShapeSpec: Unknown shape or invalid parameters.

    """
    dims = _validate_dims(dims)
    lengths = tuple(float(item) for item in lengths)
    if len(lengths) != 3 or min(lengths) <= 0.0:
        raise BadShapeSpec("lengths", "expected 3 positive values")

    kwargs = dict(shape)
    name = kwargs.pop("shape", None)
    generator = SHAPE_GENERATORS.get(name)
    if generator is None:
        expected = ", ".join(SHAPE_GENERATORS)
        raise BadShapeSpec(
            str(name), f"unknown shape, expected one of: {expected}"
        )

    coords = cell_coordinates(dims, lengths)
    try:
        inside = generator(coords, lengths, **kwargs)
    except TypeError as exc:
        raise BadShapeSpec(name, str(exc))

    indicator = np.broadcast_to(inside, dims)
    image = PhaseImage(indicator, lengths)
    log.debug(
        f"Generated {name} {dims}"
        f" with inclusion fraction {image.volume_fraction:.6f}"
    )
    return image
