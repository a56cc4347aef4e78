"""Planar interface facets of composite boxels."""
import logging
import itertools
from typing import List

import attr
import numpy as np

from .coarsening import ComboGrid

BISECTION_STEPS = 64
FLAT_COMPONENT = 1e-9
TRACE_TOLERANCE = 1e-9

log = logging.getLogger(__name__)

_CORNERS = np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)
_FACTORIALS = np.array([1.0, 1.0, 2.0, 6.0])
_EDGES = [
    (first, second)
    for first, second in itertools.combinations(range(8), 2)
    if np.count_nonzero(_CORNERS[first] != _CORNERS[second]) == 1
]


@attr.s
class Facet(object):
    """Planar facet of one composite boxel in cell coordinates."""

    index = attr.ib()
    normal = attr.ib()
    c_plus = attr.ib()
    offset = attr.ib()
    vertices = attr.ib()
    centroid = attr.ib()
    area = attr.ib()


@attr.s
class FacetGapReport(object):
    """Mismatch of facet traces on faces shared by composite boxels.

    Args:
        mean_gap (float): Mean Hausdorff distance of matched traces.
        max_gap (float): Largest Hausdorff distance of matched traces.
        matched_faces (int): Faces where both neighbors have a trace.
        unmatched_faces (int): Faces where only one neighbor has a trace.
    """

    mean_gap = attr.ib()
    max_gap = attr.ib()
    matched_faces = attr.ib()
    unmatched_faces = attr.ib()


def cut_volume_fraction(normal, offset, size) -> np.ndarray:
    """Fraction of box [0, size] with x . normal <= offset.

    Closed form inclusion-exclusion sum over box corners. Components with
    magnitude below 1e-9 are treated as zero.
    """
    normal = np.asarray(normal, dtype=float)
    size = np.broadcast_to(np.asarray(size, dtype=float), normal.shape)
    offset = np.asarray(offset, dtype=float)

    # reflect axes so all components are non-negative
    shift = np.sum(np.minimum(normal, 0.0) * size, axis=-1)
    slopes = np.abs(normal) * size
    level = offset - shift
    active = np.abs(normal) > FLAT_COMPONENT
    slopes = np.where(active, slopes, 0.0)
    order = np.count_nonzero(active, axis=-1)

    total = np.zeros(np.broadcast(level, order).shape)
    for corner in _CORNERS:
        allowed = np.all(active | (corner == 0.0), axis=-1)
        reach = np.maximum(level - np.sum(slopes * corner, axis=-1), 0.0)
        sign = -1.0 if int(corner.sum()) % 2 else 1.0
        total += np.where(allowed, sign * reach ** order, 0.0)

    factorials = _FACTORIALS[order]
    scale = factorials * np.prod(np.where(active, slopes, 1.0), axis=-1)
    return np.clip(total / scale, 0.0, 1.0)


def facet_offset(normal, c_plus, size) -> np.ndarray:
    """Plane offsets d with cut volume fraction equal to 'c_plus'.

    Bisection in the range of x . normal over the box corners.
    """
    normal = np.asarray(normal, dtype=float)
    c_plus = np.asarray(c_plus, dtype=float)
    size = np.broadcast_to(np.asarray(size, dtype=float), normal.shape)
    low = np.sum(np.minimum(normal, 0.0) * size, axis=-1)
    high = np.sum(np.maximum(normal, 0.0) * size, axis=-1)
    low, high = np.broadcast_arrays(low, high)
    low, high = low.copy(), high.copy()
    for _ in range(BISECTION_STEPS):
        middle = 0.5 * (low + high)
        below = cut_volume_fraction(normal, middle, size) < c_plus
        low = np.where(below, middle, low)
        high = np.where(below, high, middle)
    return 0.5 * (low + high)


def facet_polygon(normal, offset, size) -> np.ndarray:
    """Ordered vertices of the plane x . normal = offset inside a box.

    Returns:
        np.ndarray: Vertices (K, 3) in box coordinates ordered around the
            normal, empty when the plane misses the box.

    """
    normal = np.asarray(normal, dtype=float)
    corners = _CORNERS * np.asarray(size, dtype=float)
    values = corners @ normal - offset
    scale = float(np.max(np.abs(corners @ normal))) or 1.0

    points = []
    for first, second in _EDGES:
        value_a, value_b = values[first], values[second]
        if value_a * value_b > 0.0:
            continue
        if value_a == value_b:
            if value_a == 0.0:
                points.extend((corners[first], corners[second]))
            continue
        t = value_a / (value_a - value_b)
        points.append(corners[first] + t * (corners[second] - corners[first]))

    unique: List[np.ndarray] = []
    for point in points:
        if all(
            np.linalg.norm(point - other) > 1e-12 * scale
            for other in unique
        ):
            unique.append(point)
    if len(unique) < 3:
        return np.zeros((0, 3))

    vertices = np.array(unique)
    center = vertices.mean(axis=0)
    helper = np.eye(3)[np.argmin(np.abs(normal))]
    first_axis = np.cross(normal, helper)
    first_axis /= np.linalg.norm(first_axis)
    second_axis = np.cross(normal, first_axis)
    relative = vertices - center
    angles = np.arctan2(relative @ second_axis, relative @ first_axis)
    return vertices[np.argsort(angles)]


def polygon_area_centroid(vertices):
    origin = vertices.mean(axis=0)
    area = 0.0
    weighted = np.zeros(3)
    count = len(vertices)
    for position in range(count):
        first = vertices[position] - origin
        second = vertices[(position + 1) % count] - origin
        part = 0.5 * np.linalg.norm(np.cross(first, second))
        area += part
        weighted += part * (origin + (first + second) / 3.0)
    if area == 0.0:
        return 0.0, origin
    return area, weighted / area


def facet_export(grid: ComboGrid) -> List[Facet]:
    """Facets of all composite boxels in cell coordinates.

    Each facet is the plane x . N = d cut by its boxel, with d chosen so the
    cut volume on the side of phase + equals c_plus.
    """
    indices = grid.composite_indices
    size = grid.boxel_size
    mask = grid.composite_mask
    normals = grid.normals[mask]
    c_plus = grid.c_plus[mask]
    offsets = facet_offset(normals, c_plus, size)

    facets = []
    for index, normal, fraction, offset in zip(
        indices, normals, c_plus, offsets
    ):
        corner = index * size
        local = facet_polygon(normal, offset, size)
        area, centroid = 0.0, 0.5 * size
        if len(local):
            area, centroid = polygon_area_centroid(local)
        facets.append(Facet(
            index=tuple(int(item) for item in index),
            normal=normal,
            c_plus=float(fraction),
            offset=float(offset + corner @ normal),
            vertices=local + corner,
            centroid=centroid + corner,
            area=float(area),
        ))
    log.debug(f"Exported {len(facets)} facets")
    return facets


def _face_trace(vertices, axis, coordinate, tolerance):
    on_face = vertices[np.abs(vertices[:, axis] - coordinate) <= tolerance]
    if len(on_face) == 0:
        return None
    if len(on_face) == 1:
        return on_face[0], on_face[0]
    distances = np.linalg.norm(
        on_face[:, None, :] - on_face[None, :, :], axis=-1
    )
    first, second = np.unravel_index(np.argmax(distances), distances.shape)
    return on_face[first], on_face[second]


def _point_segment_distance(point, start, end):
    direction = end - start
    length = float(direction @ direction)
    if length == 0.0:
        return float(np.linalg.norm(point - start))
    t = np.clip((point - start) @ direction / length, 0.0, 1.0)
    return float(np.linalg.norm(point - (start + t * direction)))


def segment_hausdorff(first, second) -> float:
    """Symmetric Hausdorff distance of two segments given by end points."""
    return max(
        max(_point_segment_distance(point, *second) for point in first),
        max(_point_segment_distance(point, *first) for point in second),
    )


def facet_gap(grid: ComboGrid, facets=None) -> FacetGapReport:
    """Gap metric of facets on faces between adjacent composite boxels.

    Only faces inside the cell are compared, periodic neighbors are skipped.
    """
    if facets is None:
        facets = facet_export(grid)
    by_index = {facet.index: facet for facet in facets}
    size = grid.boxel_size
    tolerance = TRACE_TOLERANCE * float(np.max(size))

    gaps = []
    unmatched = 0
    for index, facet in by_index.items():
        for axis in range(3):
            neighbor_index = list(index)
            neighbor_index[axis] += 1
            neighbor = by_index.get(tuple(neighbor_index))
            if neighbor is None:
                continue
            coordinate = (index[axis] + 1) * size[axis]
            trace = _face_trace(facet.vertices, axis, coordinate, tolerance)
            other = _face_trace(
                neighbor.vertices, axis, coordinate, tolerance
            )
            if trace is None and other is None:
                continue
            if trace is None or other is None:
                unmatched += 1
                continue
            gaps.append(segment_hausdorff(trace, other))

    if not gaps:
        return FacetGapReport(0.0, 0.0, 0, unmatched)
    return FacetGapReport(
        mean_gap=float(np.mean(gaps)),
        max_gap=float(np.max(gaps)),
        matched_faces=len(gaps),
        unmatched_faces=unmatched,
    )
