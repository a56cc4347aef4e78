"""Determinant, inverse and eigen solver for batches of 3x3 matrices."""
from typing import Tuple

import numpy as np

from .exceptions import SingularMatrix, NotSymmetric

SINGULAR_THRESHOLD = 1e-300
SYMMETRY_TOLERANCE = 1e-10
EIGEN_GAP_TOLERANCE = 1e-8
_JACOBI_SWEEPS = 10
_JACOBI_PAIRS = ((0, 1), (0, 2), (1, 2))


def det3(t: np.ndarray) -> np.ndarray:
    """Determinant of (..., 3, 3) by cofactor expansion."""
    t = np.asarray(t, dtype=float)
    minor_0 = t[..., 1, 1] * t[..., 2, 2] - t[..., 1, 2] * t[..., 2, 1]
    minor_1 = t[..., 1, 0] * t[..., 2, 2] - t[..., 1, 2] * t[..., 2, 0]
    minor_2 = t[..., 1, 0] * t[..., 2, 1] - t[..., 1, 1] * t[..., 2, 0]
    return (
        t[..., 0, 0] * minor_0
        - t[..., 0, 1] * minor_1
        + t[..., 0, 2] * minor_2
    )


def adjugate3(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    adj = np.empty(t.shape)
    adj[..., 0, 0] = t[..., 1, 1] * t[..., 2, 2] - t[..., 1, 2] * t[..., 2, 1]
    adj[..., 0, 1] = t[..., 0, 2] * t[..., 2, 1] - t[..., 0, 1] * t[..., 2, 2]
    adj[..., 0, 2] = t[..., 0, 1] * t[..., 1, 2] - t[..., 0, 2] * t[..., 1, 1]
    adj[..., 1, 0] = t[..., 1, 2] * t[..., 2, 0] - t[..., 1, 0] * t[..., 2, 2]
    adj[..., 1, 1] = t[..., 0, 0] * t[..., 2, 2] - t[..., 0, 2] * t[..., 2, 0]
    adj[..., 1, 2] = t[..., 0, 2] * t[..., 1, 0] - t[..., 0, 0] * t[..., 1, 2]
    adj[..., 2, 0] = t[..., 1, 0] * t[..., 2, 1] - t[..., 1, 1] * t[..., 2, 0]
    adj[..., 2, 1] = t[..., 0, 1] * t[..., 2, 0] - t[..., 0, 0] * t[..., 2, 1]
    adj[..., 2, 2] = t[..., 0, 0] * t[..., 1, 1] - t[..., 0, 1] * t[..., 1, 0]
    return adj


def inv3(t: np.ndarray) -> np.ndarray:
    """Inverse of (..., 3, 3) matrices.

    Args:
        t (np.ndarray): Matrices to invert.

    Returns:
        np.ndarray: Inverted matrices.

    Raises:
        SingularMatrix: Any matrix has |det| <= 1e-300.

    """
    det = det3(t)
    singular = np.abs(det) <= SINGULAR_THRESHOLD
    if np.any(singular):
        raise SingularMatrix(
            float(np.min(np.abs(det))), int(np.count_nonzero(singular))
        )
    return adjugate3(t) / det[..., None, None]


def det_lemma(t: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Determinant of the rank-1 update t + u⊗v.

    Uses det(t + u⊗v) = (1 + vᵀ t⁻¹ u) det(t).
    """
    t_inv = inv3(t)
    correction = np.einsum("...i,...ij,...j->...", v, t_inv, u)
    return (1.0 + correction) * det3(t)


def _closed_form_eigen(a: np.ndarray):
    """Trigonometric eigenvalues and cross-product eigenvectors.

    Input is normalized to unit Frobenius norm. Returns ascending
    eigenvalues, eigenvector columns and a mask of entries whose
    eigenvalue gaps are too small for the cross product construction.
    """
    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    p1 = a[..., 0, 1] ** 2 + a[..., 0, 2] ** 2 + a[..., 1, 2] ** 2
    b = a - q[..., None, None] * np.eye(3)
    p2 = (
        b[..., 0, 0] ** 2 + b[..., 1, 1] ** 2 + b[..., 2, 2] ** 2 + 2.0 * p1
    )
    p = np.sqrt(p2 / 6.0)
    safe_p = np.where(p > 0.0, p, 1.0)
    r = np.clip(det3(b / safe_p[..., None, None]) / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    high = q + 2.0 * p * np.cos(phi)
    low = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    mid = 3.0 * q - low - high
    values = np.stack([low, mid, high], axis=-1)

    def _vector_for(value):
        rows = a - value[..., None, None] * np.eye(3)
        candidates = np.stack([
            np.cross(rows[..., 0, :], rows[..., 1, :]),
            np.cross(rows[..., 0, :], rows[..., 2, :]),
            np.cross(rows[..., 1, :], rows[..., 2, :]),
        ], axis=-2)
        norms = np.linalg.norm(candidates, axis=-1)
        best = np.argmax(norms, axis=-1)
        vector = np.take_along_axis(
            candidates, best[..., None, None], axis=-2
        )[..., 0, :]
        norm = np.take_along_axis(norms, best[..., None], axis=-1)[..., 0]
        return vector / np.where(norm > 0.0, norm, 1.0)[..., None], norm

    v_low, n_low = _vector_for(low)
    v_high, n_high = _vector_for(high)
    overlap = np.einsum("...i,...i->...", v_high, v_low)
    v_high = v_high - overlap[..., None] * v_low
    v_high /= np.maximum(np.linalg.norm(v_high, axis=-1), 1e-300)[..., None]
    v_mid = np.cross(v_high, v_low)
    vectors = np.stack([v_low, v_mid, v_high], axis=-1)

    gaps = np.minimum(mid - low, high - mid)
    degenerate = (
        (gaps < EIGEN_GAP_TOLERANCE)
        | (n_low < EIGEN_GAP_TOLERANCE)
        | (n_high < EIGEN_GAP_TOLERANCE)
        | ~np.all(np.isfinite(vectors), axis=(-2, -1))
    )
    vectors[degenerate] = np.eye(3)
    return values, vectors, degenerate


def _jacobi_cleanup(a: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Cyclic Jacobi sweeps on Vᵀ a V, accumulated into V."""
    d = np.einsum("...ji,...jk,...kl->...il", vectors, a, vectors)
    for _ in range(_JACOBI_SWEEPS):
        off = (
            np.abs(d[..., 0, 1]) + np.abs(d[..., 0, 2]) + np.abs(d[..., 1, 2])
        )
        if not np.any(off > 1e-17):
            break
        for p, q in _JACOBI_PAIRS:
            apq = d[..., p, q]
            active = np.abs(apq) > 1e-300
            safe_apq = np.where(active, apq, 1.0)
            theta = (d[..., q, q] - d[..., p, p]) / (2.0 * safe_apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t ** 2 + 1.0)
            s = t * c
            rotation = np.broadcast_to(np.eye(3), d.shape).copy()
            rotation[..., p, p] = c
            rotation[..., q, q] = c
            rotation[..., p, q] = s
            rotation[..., q, p] = -s
            d = np.einsum("...ji,...jk,...kl->...il", rotation, d, rotation)
            vectors = np.einsum("...ij,...jk->...ik", vectors, rotation)
    return vectors


def sym_eig3(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen decomposition of symmetric 3x3 matrices.

    Closed form solution followed by Jacobi cleanup sweeps. Entries with
    eigenvalue gaps below 1e-8 of the matrix norm start the sweeps from
    identity instead of the closed form vectors.

    Args:
        m (np.ndarray): Symmetric matrices (..., 3, 3).

    Returns:
        Tuple[np.ndarray, np.ndarray]: Ascending eigenvalues (..., 3) and
            orthonormal eigenvectors as columns (..., 3, 3).

    Raises:
        NotSymmetric: Skew part exceeds 1e-10 of the matrix norm.

    """
    m = np.asarray(m, dtype=float)
    norm = np.linalg.norm(m, axis=(-2, -1))
    skew = np.linalg.norm(m - np.swapaxes(m, -1, -2), axis=(-2, -1))
    relative = skew / np.where(norm > 0.0, norm, 1.0)
    if np.any(relative > SYMMETRY_TOLERANCE):
        raise NotSymmetric(float(np.max(relative)))

    scale = np.where(norm > 0.0, norm, 1.0)
    a = 0.5 * (m + np.swapaxes(m, -1, -2)) / scale[..., None, None]
    _, vectors, _ = _closed_form_eigen(a)
    vectors = _jacobi_cleanup(a, vectors)

    diagonal = np.einsum("...ji,...jk,...ki->...i", vectors, a, vectors)
    order = np.argsort(diagonal, axis=-1)
    values = np.take_along_axis(diagonal, order, axis=-1) * scale[..., None]
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)
    return values, vectors
