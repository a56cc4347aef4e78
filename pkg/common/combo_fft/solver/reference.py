import logging
from typing import Iterable

import attr
import numpy as np

from combo_fft.materials import MaterialLaw

log = logging.getLogger(__name__)


@attr.s(frozen=True)
class ReferenceMedium(object):
    """Isotropic reference stiffness alpha times identity on 9-space.

    Args:
        alpha (float): Reference stiffness.
        lower (float): Lower bound of the tangent spectra.
        upper (float): Upper bound of the tangent spectra.
    """

    alpha = attr.ib(converter=float)
    lower = attr.ib(converter=float)
    upper = attr.ib(converter=float)

    @alpha.validator
    def _check_alpha(self, attribute, value):
        if not value > 0.0:
            raise ValueError(f"Reference stiffness must be positive: {value}")

    @property
    def contrast(self) -> float:
        return self.upper / self.lower if self.lower > 0.0 else np.inf


def reference_medium(
    laws: Iterable[MaterialLaw], F_bar: np.ndarray
) -> ReferenceMedium:
    """Reference medium alpha = (a_min + a_max) / 2 at the load F_bar.

    Bounds come from every law evaluated at the macroscopic gradient. The
    solvers call it once per load step with the step target, so alpha stays
    fixed over the outer iterations of a step. The Newton system projected
    by the Green operator does not depend on alpha, only the basic scheme
    and the residual floor do.
    """
    bounds = [law.reference_bounds(F_bar) for law in laws]
    lower = min(bound[0] for bound in bounds)
    upper = max(bound[1] for bound in bounds)
    if lower <= 0.0:
        log.warning(
            f"Non-positive lower tangent bound {lower:.3e}, using upper"
            " bound only"
        )
        lower = 0.0
    medium = ReferenceMedium(0.5 * (lower + upper), lower, upper)
    log.debug(
        f"Reference medium alpha={medium.alpha:.4e}"
        f" bounds=({lower:.4e}, {upper:.4e})"
    )
    return medium
