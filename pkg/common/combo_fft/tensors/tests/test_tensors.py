import numpy as np
import pytest

from combo_fft.tensors import (
    SQRT2,
    SingularMatrix,
    NotSymmetric,
    to_vector,
    from_vector,
    to_mandel,
    from_mandel,
    mandel_to_tensor4,
    tensor4_to_mandel,
    det3,
    inv3,
    det_lemma,
    sym_eig3,
)
from combo_fft.tensors.linalg import _jacobi_cleanup


@pytest.fixture
def rng():
    yield np.random.default_rng(1234)


@pytest.fixture
def random_symmetric(rng):
    def _create(count):
        m = rng.normal(size=(count, 3, 3))
        return 0.5 * (m + np.swapaxes(m, -1, -2))
    yield _create


def test_identity_to_vector():
    assert np.array_equal(
        to_vector(np.eye(3)), [1, 0, 0, 0, 1, 0, 0, 0, 1]
    ), "Identity is not flattened row-major"


def test_mandel_shear_component():
    s = np.zeros((3, 3))
    s[0, 1] = s[1, 0] = 1.0
    assert np.allclose(to_mandel(s), [0, 0, 0, SQRT2, 0, 0], atol=0)


def test_inner_products_are_preserved(rng, random_symmetric):
    f = rng.normal(size=(50, 3, 3))
    p = rng.normal(size=(50, 3, 3))
    contraction = np.einsum("nij,nij->n", f, p)
    assert np.allclose(
        np.einsum("np,np->n", to_vector(f), to_vector(p)), contraction,
        rtol=1e-12, atol=1e-12
    )

    s = random_symmetric(50)
    e = random_symmetric(50)
    contraction = np.einsum("nij,nij->n", s, e)
    mandel = np.einsum("np,np->n", to_mandel(s), to_mandel(e))
    assert np.allclose(mandel, contraction, rtol=1e-12, atol=1e-12)


def test_mandel_round_trip_is_bit_stable():
    s = np.array([[1.0, 0.5, 0.25], [0.5, 2.0, -0.75], [0.25, -0.75, 3.0]])
    assert np.array_equal(from_mandel(to_mandel(s)), s)
    assert np.array_equal(from_vector(to_vector(s)), s)


def test_tensor4_mandel_round_trip(rng):
    c = rng.normal(size=(6, 6))
    c = c + c.T
    assert np.allclose(tensor4_to_mandel(mandel_to_tensor4(c)), c, atol=1e-14)


def test_det_and_inverse():
    assert det3(np.eye(3)) == 1.0
    assert np.array_equal(inv3(np.eye(3)), np.eye(3))
    assert det3(np.diag([2.0, 3.0, 4.0])) == 24.0


def test_inverse_of_random_matrices(rng):
    t = rng.normal(size=(100, 3, 3)) + 3.0 * np.eye(3)
    t_inv = inv3(t)
    residual = np.einsum("nij,njk->nik", t, t_inv) - np.eye(3)
    assert np.max(np.abs(residual)) < 1e-12
    assert np.allclose(det3(t) * det3(t_inv), 1.0, rtol=1e-12, atol=0)


def test_singular_matrix_raises():
    with pytest.raises(SingularMatrix):
        inv3(np.zeros((3, 3)))


def test_det_lemma_trivial_cases():
    t = np.diag([2.0, 3.0, 4.0])
    assert det_lemma(t, np.zeros(3), np.ones(3)) == pytest.approx(24.0)
    e1 = np.array([1.0, 0.0, 0.0])
    assert det_lemma(np.eye(3), e1, e1) == pytest.approx(2.0)


def test_det_lemma_matches_rank_one_update(rng):
    t = rng.normal(size=(1000, 3, 3)) + 2.0 * np.eye(3)
    u = rng.normal(size=(1000, 3))
    v = rng.normal(size=(1000, 3))
    direct = det3(t + np.einsum("ni,nj->nij", u, v))
    lemma = det_lemma(t, u, v)
    scale = np.maximum(np.abs(direct), 1.0)
    assert np.max(np.abs(lemma - direct) / scale) < 1e-10


def test_sym_eig3_diagonal():
    values, vectors = sym_eig3(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(values, [1.0, 2.0, 3.0], atol=1e-14)
    assert np.allclose(np.abs(vectors[:, 0]), [0.0, 1.0, 0.0], atol=1e-12)


def test_sym_eig3_rank_one():
    n = np.array([1.0, 2.0, -2.0]) / 3.0
    values, vectors = sym_eig3(np.outer(n, n))
    assert np.allclose(values, [0.0, 0.0, 1.0], atol=1e-12)
    assert abs(abs(vectors[:, 2] @ n) - 1.0) < 1e-12


def test_sym_eig3_reconstruction(rng, random_symmetric):
    m = random_symmetric(500)
    m[:100] = np.einsum("nij,nkj->nik", m[:100], m[:100])
    m[100:110] = np.eye(3) * 2.0
    values, vectors = sym_eig3(m)
    rebuilt = np.einsum("nij,nj,nkj->nik", vectors, values, vectors)
    error = np.linalg.norm(rebuilt - m, axis=(1, 2))
    assert np.all(error <= 1e-10 * np.linalg.norm(m, axis=(1, 2)))
    assert np.all(np.diff(values, axis=1) >= 0.0), "Not sorted ascending"
    gram = np.einsum("nji,njk->nik", vectors, vectors)
    assert np.allclose(gram, np.eye(3), atol=1e-12)


def test_sym_eig3_rejects_non_symmetric():
    m = np.eye(3)
    m[0, 1] = 1.0
    with pytest.raises(NotSymmetric):
        sym_eig3(m)


def test_jacobi_sweep_tiny_coupling_does_not_overflow():
    a = np.array([
        [1.0, 1e-200, 0.0],
        [1e-200, 2.0, 1e-3],
        [0.0, 1e-3, 3.0],
    ])
    with np.errstate(over="raise"):
        vectors = _jacobi_cleanup(a, np.eye(3))
    d = vectors.T @ a @ vectors
    assert np.all(np.isfinite(vectors))
    assert np.allclose(vectors.T @ vectors, np.eye(3), atol=1e-12)
    assert abs(d[1, 2]) < 1e-14, "coupled pair was not rotated away"


def test_sym_eig3_near_diagonal_batch(random_symmetric):
    m = random_symmetric(4)
    m[0] = np.diag([1.0, 2.0, 3.0])
    m[0, 0, 1] = m[0, 1, 0] = 1e-200
    with np.errstate(over="raise"):
        values, vectors = sym_eig3(m)
    rebuilt = np.einsum("nij,nj,nkj->nik", vectors, values, vectors)
    error = np.linalg.norm(rebuilt - m, axis=(1, 2))
    assert np.all(error <= 1e-10 * np.linalg.norm(m, axis=(1, 2)))
