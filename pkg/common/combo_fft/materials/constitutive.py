"""Pointwise constitutive relations.

Deformation gradients, stresses and strains are arrays with trailing shape
(3, 3); fourth order results use Mandel 6x6 (symmetric stiffness) or the
9x9 form (PK1 tangent). Every function broadcasts over leading dimensions.
"""
from typing import Tuple

import numpy as np

from combo_fft.tensors import (
    IDENTITY2,
    det3,
    inv3,
    to_mandel,
    from_mandel,
    mandel_to_tensor4,
    tensor4_to_mandel,
    tensor4_to_matrix9,
)

from .exceptions import InadmissibleDeformation
from .parameters import NeoHookeanParams, LinearElasticParams, ThermalParams


def check_admissible(F: np.ndarray) -> np.ndarray:
    """Determinant of F, raising when any value is not positive.

    Raises:
        InadmissibleDeformation: det(F) <= 0 somewhere.

    """
    det = det3(F)
    bad = ~(det > 0.0)
    if np.any(bad):
        raise InadmissibleDeformation(
            np.flatnonzero(bad), float(np.min(det))
        )
    return det


def right_cauchy_green(F: np.ndarray) -> np.ndarray:
    return np.einsum("...ki,...kj->...ij", F, F)


def neo_hookean_stiffness(
    c_inv: np.ndarray, ln_j: np.ndarray, params: NeoHookeanParams
) -> np.ndarray:
    """Material stiffness ∂S/∂E of the Neo-Hookean model in Mandel form."""
    lam = params.lam
    factor = params.mu - lam * ln_j
    full = (
        lam * np.einsum("...ij,...kl->...ijkl", c_inv, c_inv)
        + factor[..., None, None, None, None] * (
            np.einsum("...ik,...jl->...ijkl", c_inv, c_inv)
            + np.einsum("...il,...jk->...ijkl", c_inv, c_inv)
        )
    )
    return tensor4_to_mandel(full)


def neo_hookean(
    F: np.ndarray, params: NeoHookeanParams
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Energy, second Piola-Kirchhoff stress and stiffness.

    W = ½λ(ln J)² − μ ln J + ½μ(tr C − 3),
    S = λ ln J C⁻¹ + μ(I − C⁻¹).

    Args:
        F (np.ndarray): Deformation gradients (..., 3, 3).
        params (NeoHookeanParams): Material parameters.

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: Energy (...), S as
            symmetric (..., 3, 3) and stiffness in Mandel form (..., 6, 6).

    Raises:
        InadmissibleDeformation: det(F) <= 0.

    """
    F = np.asarray(F, dtype=float)
    jacobian = check_admissible(F)
    ln_j = np.log(jacobian)
    c = right_cauchy_green(F)
    c_inv = inv3(c)
    lam, mu = params.lam, params.mu

    energy = (
        0.5 * lam * ln_j ** 2
        - mu * ln_j
        + 0.5 * mu * (np.trace(c, axis1=-2, axis2=-1) - 3.0)
    )
    stress = (
        lam * ln_j[..., None, None] * c_inv + mu * (IDENTITY2 - c_inv)
    )
    stress = 0.5 * (stress + np.swapaxes(stress, -1, -2))
    return energy, stress, neo_hookean_stiffness(c_inv, ln_j, params)


def pk2_to_pk1(F: np.ndarray, S: np.ndarray) -> np.ndarray:
    """First Piola-Kirchhoff stress P = F S."""
    return np.einsum("...ik,...kj->...ij", F, S)


def tangent_pk1(F: np.ndarray, S: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Tangent A = ∂P/∂F in 9x9 form.

    A_iJkL = δ_ik S_JL + F_iI ℂ_IJKL F_kK.

    Args:
        F (np.ndarray): Deformation gradients (..., 3, 3).
        S (np.ndarray): Second Piola-Kirchhoff stresses (..., 3, 3).
        C (np.ndarray): Material stiffness in Mandel form (..., 6, 6).

    Returns:
        np.ndarray: Tangents (..., 9, 9).

    """
    full = mandel_to_tensor4(C)
    material = np.einsum("...iI,...IJKL,...kK->...iJkL", F, full, F)
    geometric = np.einsum("ik,...JL->...iJkL", IDENTITY2, S)
    return tensor4_to_matrix9(material + geometric)


def linear_stress(
    strain: np.ndarray, params: LinearElasticParams
) -> np.ndarray:
    """Cauchy stress σ = ℂ : ε of symmetric strains (..., 3, 3)."""
    mandel = np.einsum("pq,...q->...p", params.stiffness, to_mandel(strain))
    return from_mandel(mandel)


def thermal_flux(gradient: np.ndarray, params: ThermalParams) -> np.ndarray:
    """Heat flux q = −κ g (Fourier's law)."""
    return -np.einsum("ij,...j->...i", params.kappa, gradient)


def green_lagrange_strain(F: np.ndarray) -> np.ndarray:
    return 0.5 * (right_cauchy_green(F) - IDENTITY2)


def cauchy_stress(F: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Cauchy stress σ = J⁻¹ P Fᵀ."""
    jacobian = check_admissible(F)
    sigma = np.einsum("...iK,...jK->...ij", P, F) / jacobian[..., None, None]
    return 0.5 * (sigma + np.swapaxes(sigma, -1, -2))


def von_mises(sigma: np.ndarray) -> np.ndarray:
    trace = np.trace(sigma, axis1=-2, axis2=-1)
    deviator = sigma - trace[..., None, None] / 3.0 * IDENTITY2
    return np.sqrt(1.5 * np.einsum("...ij,...ij->...", deviator, deviator))
