"""Vector and matrix notation of small tensors.

Second order tensors are numpy arrays with trailing shape (3, 3). The
9-vector form is the row-major flattening (11, 12, 13, 21, ..., 33) and
fourth order tensors acting on it are 9x9 matrices in the same ordering.
Symmetric tensors use the orthonormal Mandel form (11, 22, 33, √2·12,
√2·13, √2·23) so that inner products are preserved in both spaces.

All functions broadcast over leading dimensions.
"""
import numpy as np

SQRT2 = np.sqrt(2.0)
MANDEL_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))
MANDEL_WEIGHTS = np.array([1.0, 1.0, 1.0, SQRT2, SQRT2, SQRT2])
IDENTITY2 = np.eye(3)


def to_vector(t: np.ndarray) -> np.ndarray:
    """Tensor (..., 3, 3) to 9-vector (..., 9)."""
    t = np.asarray(t, dtype=float)
    return t.reshape(t.shape[:-2] + (9,))


def from_vector(v: np.ndarray) -> np.ndarray:
    """9-vector (..., 9) to tensor (..., 3, 3)."""
    v = np.asarray(v, dtype=float)
    return v.reshape(v.shape[:-1] + (3, 3))


def to_mandel(s: np.ndarray) -> np.ndarray:
    """Symmetric tensor (..., 3, 3) to Mandel 6-vector (..., 6).

    Only the upper triangle is read; callers pass symmetric input.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape[:-2] + (6,))
    for idx, (i, j) in enumerate(MANDEL_PAIRS):
        out[..., idx] = s[..., i, j] * MANDEL_WEIGHTS[idx]
    return out


def from_mandel(m: np.ndarray) -> np.ndarray:
    """Mandel 6-vector (..., 6) to symmetric tensor (..., 3, 3)."""
    m = np.asarray(m, dtype=float)
    out = np.empty(m.shape[:-1] + (3, 3))
    for idx, (i, j) in enumerate(MANDEL_PAIRS):
        value = m[..., idx] / MANDEL_WEIGHTS[idx]
        out[..., i, j] = value
        out[..., j, i] = value
    return out


def mandel_to_tensor4(c: np.ndarray) -> np.ndarray:
    """Mandel 6x6 matrix to full (..., 3, 3, 3, 3) tensor."""
    c = np.asarray(c, dtype=float)
    out = np.empty(c.shape[:-2] + (3, 3, 3, 3))
    for p, (i, j) in enumerate(MANDEL_PAIRS):
        for q, (k, l) in enumerate(MANDEL_PAIRS):
            value = c[..., p, q] / (MANDEL_WEIGHTS[p] * MANDEL_WEIGHTS[q])
            out[..., i, j, k, l] = value
            out[..., j, i, k, l] = value
            out[..., i, j, l, k] = value
            out[..., j, i, l, k] = value
    return out


def tensor4_to_mandel(c: np.ndarray) -> np.ndarray:
    """Full tensor with minor symmetries to Mandel (..., 6, 6)."""
    c = np.asarray(c, dtype=float)
    out = np.empty(c.shape[:-4] + (6, 6))
    for p, (i, j) in enumerate(MANDEL_PAIRS):
        for q, (k, l) in enumerate(MANDEL_PAIRS):
            out[..., p, q] = (
                c[..., i, j, k, l] * MANDEL_WEIGHTS[p] * MANDEL_WEIGHTS[q]
            )
    return out


def tensor4_to_matrix9(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    return c.reshape(c.shape[:-4] + (9, 9))


def matrix9_to_tensor4(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a.reshape(a.shape[:-2] + (3, 3, 3, 3))


def mandel_to_matrix9(c: np.ndarray) -> np.ndarray:
    """Embed a symmetric Mandel stiffness into the 9x9 form."""
    return tensor4_to_matrix9(mandel_to_tensor4(c))


def ddot(a9: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Apply 9x9 matrix to tensor: (A : T) with result (..., 3, 3)."""
    vec = np.einsum("...pq,...q->...p", a9, to_vector(t))
    return from_vector(vec)


def symmetric_part(t: np.ndarray) -> np.ndarray:
    return 0.5 * (t + np.swapaxes(t, -1, -2))


def outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Dyadic product u⊗v for (..., 3) vectors."""
    return np.einsum("...i,...j->...ij", u, v)


def identity_mandel() -> np.ndarray:
    """Symmetric fourth order identity in Mandel form."""
    return np.eye(6)


def isotropic_mandel(lam: float, mu: float) -> np.ndarray:
    """Isotropic stiffness λ I⊗I + 2μ 𝕀ˢ in Mandel form."""
    c = 2.0 * mu * np.eye(6)
    c[:3, :3] += lam
    return c
