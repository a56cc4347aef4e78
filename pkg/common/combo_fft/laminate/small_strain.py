"""Closed-form laminate of two linear elastic phases (infinitesimal strain).

Strains, stresses and stiffnesses use the Mandel notation.
"""
import numpy as np

from combo_fft.tensors import SQRT2, SingularMatrix, to_mandel

from .structures import ComboMeta


def symmetric_jump_matrix(normal: np.ndarray) -> np.ndarray:
    """Matrix D_s with mandel(sym(a⊗N)) = D_s a."""
    n1, n2, n3 = np.asarray(normal, dtype=float)
    return np.array([
        [n1, 0.0, 0.0],
        [0.0, n2, 0.0],
        [0.0, 0.0, n3],
        [n2 / SQRT2, n1 / SQRT2, 0.0],
        [n3 / SQRT2, 0.0, n1 / SQRT2],
        [0.0, n3 / SQRT2, n2 / SQRT2],
    ])


def _hessian(stiffness_plus, stiffness_minus, meta, jump):
    hessian = jump.T @ (
        stiffness_plus / meta.c_plus + stiffness_minus / meta.c_minus
    ) @ jump
    if abs(np.linalg.det(hessian)) <= 1e-300:
        raise SingularMatrix(float(np.linalg.det(hessian)))
    return hessian


def small_strain_jump(
    strain_box: np.ndarray,
    stiffness_plus: np.ndarray,
    stiffness_minus: np.ndarray,
    meta: ComboMeta,
) -> np.ndarray:
    """Jump vector a balancing the interface tractions.

    a = Δf⁻¹ D_sᵀ (ℂ− − ℂ+) ε□ with Δf = D_sᵀ(ℂ+/c+ + ℂ−/c−)D_s.

    Args:
        strain_box (np.ndarray): Boxel strain as symmetric 3x3 or Mandel
            6-vector.
        stiffness_plus (np.ndarray): Mandel stiffness of phase +.
        stiffness_minus (np.ndarray): Mandel stiffness of phase −.
        meta (ComboMeta): Normal and volume fractions.

    Returns:
        np.ndarray: Jump vector a.

    Raises:
        SingularMatrix: Hessian is singular.

    """
    strain_box = np.asarray(strain_box, dtype=float)
    if strain_box.shape == (3, 3):
        strain_box = to_mandel(strain_box)
    jump = symmetric_jump_matrix(meta.normal)
    hessian = _hessian(stiffness_plus, stiffness_minus, meta, jump)
    rhs = jump.T @ (stiffness_minus - stiffness_plus) @ strain_box
    return np.linalg.solve(hessian, rhs)


def phase_strains(strain_box, a, meta):
    """Phase strains ε± = ε□ ± D_s a / c± in Mandel form."""
    strain_box = np.asarray(strain_box, dtype=float)
    if strain_box.shape == (3, 3):
        strain_box = to_mandel(strain_box)
    perturbation = symmetric_jump_matrix(meta.normal) @ a
    return (
        strain_box + perturbation / meta.c_plus,
        strain_box - perturbation / meta.c_minus,
    )


def small_strain_stiffness(
    stiffness_plus: np.ndarray,
    stiffness_minus: np.ndarray,
    meta: ComboMeta,
) -> np.ndarray:
    """Effective stiffness of the linear elastic laminate.

    ℂ□ = (c+ℂ+ + c−ℂ−) − δℂ D_s Δf⁻¹ D_sᵀ δℂ with δℂ = ℂ+ − ℂ−.

    Raises:
        SingularMatrix: Hessian is singular.

    """
    jump = symmetric_jump_matrix(meta.normal)
    hessian = _hessian(stiffness_plus, stiffness_minus, meta, jump)
    contrast = stiffness_plus - stiffness_minus
    voigt = meta.c_plus * stiffness_plus + meta.c_minus * stiffness_minus
    correction = contrast @ jump @ np.linalg.solve(
        hessian, jump.T @ contrast
    )
    effective = voigt - correction
    return 0.5 * (effective + effective.T)
