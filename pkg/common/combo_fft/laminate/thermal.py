from typing import Tuple

import numpy as np

from .structures import ComboMeta


def _conductivity(value):
    return np.asarray(getattr(value, "kappa", value), dtype=float)


def thermal_jump(
    gradient_box: np.ndarray,
    kappa_plus,
    kappa_minus,
    meta: ComboMeta,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Laminate of two linear heat conductors.

    Phase gradients are g± = g□ ± a N / c± and the normal flux is
    continuous across the interface. Fluxes follow q = −κ g.

    Args:
        gradient_box (np.ndarray): Temperature gradient of the boxel.
        kappa_plus (Union[np.ndarray, ThermalParams]): Conductivity of +.
        kappa_minus (Union[np.ndarray, ThermalParams]): Conductivity of −.
        meta (ComboMeta): Normal and volume fractions.

    Returns:
        Tuple[float, np.ndarray, np.ndarray]: Jump scalar a, boxel flux
            and effective conductivity.

    """
    kappa_plus = _conductivity(kappa_plus)
    kappa_minus = _conductivity(kappa_minus)
    gradient_box = np.asarray(gradient_box, dtype=float)
    normal = meta.normal
    c_plus, c_minus = meta.c_plus, meta.c_minus

    hessian = normal @ (kappa_plus / c_plus + kappa_minus / c_minus) @ normal
    jump = normal @ (kappa_minus - kappa_plus) @ gradient_box / hessian

    gradient_plus = gradient_box + jump * normal / c_plus
    gradient_minus = gradient_box - jump * normal / c_minus
    flux = -(
        c_plus * kappa_plus @ gradient_plus
        + c_minus * kappa_minus @ gradient_minus
    )

    contrast = kappa_plus - kappa_minus
    voigt = c_plus * kappa_plus + c_minus * kappa_minus
    correction = np.outer(contrast @ normal, normal @ contrast) / hessian
    kappa_box = voigt - correction
    return float(jump), flux, 0.5 * (kappa_box + kappa_box.T)


def thermal_phase_gradients(gradient_box, jump, meta):
    gradient_box = np.asarray(gradient_box, dtype=float)
    return (
        gradient_box + jump * meta.normal / meta.c_plus,
        gradient_box - jump * meta.normal / meta.c_minus,
    )
