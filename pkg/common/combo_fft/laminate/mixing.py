"""Classical mixing rules and the implicit laminate rule for stiffnesses.

All stiffnesses are symmetric Mandel 6x6 matrices.
"""
from typing import Optional

import numpy as np

from combo_fft.tensors import SingularMatrix, tensor4_to_mandel

from .exceptions import BadLambda

LAMBDA_FACTOR = 1.01


def _inverse(matrix):
    try:
        return np.linalg.inv(matrix)
    except np.linalg.LinAlgError:
        raise SingularMatrix(float(np.linalg.det(matrix)))


def mix_voigt(stiffness_plus, stiffness_minus, c_plus):
    """Voigt average c+ℂ+ + c−ℂ−."""
    return c_plus * stiffness_plus + (1.0 - c_plus) * stiffness_minus


def mix_reuss(stiffness_plus, stiffness_minus, c_plus):
    """Reuss average (c+ℂ+⁻¹ + c−ℂ−⁻¹)⁻¹.

    Raises:
        SingularMatrix: A phase stiffness is singular.

    """
    compliance = (
        c_plus * _inverse(stiffness_plus)
        + (1.0 - c_plus) * _inverse(stiffness_minus)
    )
    return _inverse(compliance)


def mix_hill(stiffness_plus, stiffness_minus, c_plus):
    """Arithmetic mean of the Voigt and Reuss estimates."""
    return 0.5 * (
        mix_voigt(stiffness_plus, stiffness_minus, c_plus)
        + mix_reuss(stiffness_plus, stiffness_minus, c_plus)
    )


def laminate_projector(normal: np.ndarray) -> np.ndarray:
    """Projector ℙ of the implicit laminate rule in Mandel form.

    ℙ_ijkl = ½(N_i δ_jk N_l + N_i δ_jl N_k
             + N_j δ_ik N_l + N_j δ_il N_k)
    − N_i N_j N_k N_l
    """
    n = np.asarray(normal, dtype=float)
    delta = np.eye(3)
    full = 0.5 * (
        np.einsum("i,jk,l->ijkl", n, delta, n)
        + np.einsum("i,jl,k->ijkl", n, delta, n)
        + np.einsum("j,ik,l->ijkl", n, delta, n)
        + np.einsum("j,il,k->ijkl", n, delta, n)
    ) - np.einsum("i,j,k,l->ijkl", n, n, n, n)
    return tensor4_to_mandel(full)


def milton_laminate(
    stiffness_plus: np.ndarray,
    stiffness_minus: np.ndarray,
    c_plus: float,
    normal: np.ndarray,
    lam: Optional[float] = None,
) -> np.ndarray:
    """Implicit laminate rule solved for the effective stiffness.

    Solves inv(P + λ inv(C_box − λI)) = ⟨inv(P + λ inv(C − λI))⟩
    for C_box, P being the laminate projector.

    Args:
        stiffness_plus (np.ndarray): Stiffness of phase +.
        stiffness_minus (np.ndarray): Stiffness of phase −.
        c_plus (float): Volume fraction of phase +.
        normal (np.ndarray): Laminate normal.
        lam (Optional[float]): Auxiliary parameter, must exceed the largest
            eigenvalue of both stiffnesses. Defaults to 1.01 times that
            eigenvalue.

    Returns:
        np.ndarray: Effective Mandel stiffness.

    Raises:
        BadLambda: Parameter is not larger than the largest eigenvalue.
        SingularMatrix: An intermediate inversion fails.

    """
    largest = max(
        float(np.max(np.linalg.eigvalsh(stiffness_plus))),
        float(np.max(np.linalg.eigvalsh(stiffness_minus))),
    )
    if lam is None:
        lam = LAMBDA_FACTOR * largest
    elif not lam > largest:
        raise BadLambda(lam, largest)

    projector = laminate_projector(normal)
    identity = np.eye(6)

    def _phase_term(stiffness):
        return _inverse(
            projector + lam * _inverse(stiffness - lam * identity)
        )

    average = (
        c_plus * _phase_term(stiffness_plus)
        + (1.0 - c_plus) * _phase_term(stiffness_minus)
    )
    effective = lam * identity + lam * _inverse(
        _inverse(average) - projector
    )
    return 0.5 * (effective + effective.T)
