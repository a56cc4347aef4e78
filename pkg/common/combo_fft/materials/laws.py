"""Finite-strain material laws used by the laminate kernel and the solvers.

A law maps deformation gradients (..., 3, 3) to first Piola-Kirchhoff
stresses and provides the tangent A = ∂P/∂F either as a dense 9x9 matrix
per point or as a matrix-free operator.
"""
import logging
from abc import ABCMeta, abstractmethod
from typing import Tuple

import numpy as np

from combo_fft.tensors import (
    IDENTITY2,
    ddot,
    inv3,
    mandel_to_matrix9,
    symmetric_part,
    to_mandel,
)

from .exceptions import BadMaterialParameters
from .parameters import (
    MaterialParams,
    NeoHookeanParams,
    LinearElasticParams,
)
from .constitutive import (
    check_admissible,
    right_cauchy_green,
    neo_hookean,
    neo_hookean_stiffness,
    pk2_to_pk1,
    tangent_pk1,
)


class TangentOperator(metaclass=ABCMeta):
    """Linearization of P around a deformation state."""

    @abstractmethod
    def apply(self, dF: np.ndarray) -> np.ndarray:
        """Increment dP = A : dF for increments shaped like the state."""
        pass


class DenseTangent(TangentOperator):
    """Tangent stored as 9x9 matrices (..., 9, 9)."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix

    def apply(self, dF):
        return ddot(self.matrix, dF)


class NeoHookeanTangent(TangentOperator):
    """Matrix-free Neo-Hookean tangent.

    dP = dF S + F [λ tr(C⁻¹dE) C⁻¹ + 2(μ − λ ln J) C⁻¹ dE C⁻¹]
    with dE = sym(Fᵀ dF).
    """

    def __init__(self, F, S, c_inv, ln_j, params):
        self._F = F
        self._S = S
        self._c_inv = c_inv
        self._factor = 2.0 * (params.mu - params.lam * ln_j)
        self._lam = params.lam

    def apply(self, dF):
        d_e = symmetric_part(np.einsum("...ki,...kj->...ij", self._F, dF))
        trace = np.einsum("...ij,...ji->...", self._c_inv, d_e)
        d_s = (
            self._lam * trace[..., None, None] * self._c_inv
            + self._factor[..., None, None] * np.einsum(
                "...ik,...kl,...lj->...ij", self._c_inv, d_e, self._c_inv
            )
        )
        return (
            np.einsum("...ik,...kj->...ij", dF, self._S)
            + np.einsum("...ik,...kj->...ij", self._F, d_s)
        )


class MaterialLaw(metaclass=ABCMeta):
    """Base of hyperelastic laws evaluated on batches of F.

    Args:
        params (MaterialParams): Material parameters.
        logger (Optional[logging.Logger]): Logger used by the law.

    """
    model_name = None

    def __init__(self, params: MaterialParams, logger=None):
        if logger is None:
            logger = logging.getLogger(self.__class__.__name__)
        self.log = logger
        self._params = params

    def __repr__(self):
        return f"<{self.__class__.__name__} - {self._params}>"

    @property
    def params(self) -> MaterialParams:
        return self._params

    @abstractmethod
    def energy(self, F: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def stress(self, F: np.ndarray) -> np.ndarray:
        """First Piola-Kirchhoff stress P(F).

        Raises:
            InadmissibleDeformation: When the law requires det(F) > 0.

        """
        pass

    @abstractmethod
    def stress_and_tangent(
        self, F: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Stress P (..., 3, 3) and dense tangent A (..., 9, 9)."""
        pass

    def linearize(self, F: np.ndarray) -> Tuple[np.ndarray, TangentOperator]:
        """Stress and tangent operator for matrix-free solvers."""
        stress, tangent = self.stress_and_tangent(F)
        return stress, DenseTangent(tangent)

    @abstractmethod
    def material_stiffness(self, F: np.ndarray) -> np.ndarray:
        """Symmetric stiffness ∂S/∂E in Mandel form at F."""
        pass

    @property
    @abstractmethod
    def stiffness_scale(self) -> float:
        """Shear-modulus-like scale used for stress floors."""
        pass

    def reference_bounds(self, F: np.ndarray) -> Tuple[float, float]:
        """Spectral bounds used to build the reference medium.

        Returns:
            Tuple[float, float]: Half of the smallest eigenvalue of the
                Mandel stiffness and largest eigenvalue of sym(A), at F.

        """
        F = np.asarray(F, dtype=float).reshape(3, 3)
        stiffness = self.material_stiffness(F)
        _, tangent = self.stress_and_tangent(F)
        tangent = 0.5 * (tangent + tangent.T)
        lower = 0.5 * float(np.min(np.linalg.eigvalsh(stiffness)))
        upper = float(np.max(np.linalg.eigvalsh(tangent)))
        return lower, upper


class NeoHookeanLaw(MaterialLaw):
    """Compressible Neo-Hookean law."""
    model_name = "neo_hookean"

    def _pk2_state(self, F):
        jacobian = check_admissible(F)
        ln_j = np.log(jacobian)
        c_inv = inv3(right_cauchy_green(F))
        stress = symmetric_part(
            self._params.lam * ln_j[..., None, None] * c_inv
            + self._params.mu * (IDENTITY2 - c_inv)
        )
        return stress, c_inv, ln_j

    def energy(self, F):
        return neo_hookean(F, self._params)[0]

    def stress(self, F):
        F = np.asarray(F, dtype=float)
        stress, _, _ = self._pk2_state(F)
        return pk2_to_pk1(F, stress)

    def stress_and_tangent(self, F):
        F = np.asarray(F, dtype=float)
        _, stress, stiffness = neo_hookean(F, self._params)
        return pk2_to_pk1(F, stress), tangent_pk1(F, stress, stiffness)

    def linearize(self, F):
        F = np.asarray(F, dtype=float)
        stress, c_inv, ln_j = self._pk2_state(F)
        tangent = NeoHookeanTangent(F, stress, c_inv, ln_j, self._params)
        return pk2_to_pk1(F, stress), tangent

    def material_stiffness(self, F):
        F = np.asarray(F, dtype=float)
        _, c_inv, ln_j = self._pk2_state(F)
        return neo_hookean_stiffness(c_inv, ln_j, self._params)

    @property
    def stiffness_scale(self):
        return self._params.mu


class LinearElasticLaw(MaterialLaw):
    """Geometrically linear elasticity P = ℂ : sym(F − I).

    Lets every finite-strain solver run unchanged in small-strain mode.
    """
    model_name = "linear"

    def __init__(self, params, logger=None):
        super().__init__(params, logger)
        self._tangent = mandel_to_matrix9(params.stiffness)

    def _strain(self, F):
        return symmetric_part(np.asarray(F, dtype=float) - IDENTITY2)

    def energy(self, F):
        strain = to_mandel(self._strain(F))
        return 0.5 * np.einsum(
            "...p,pq,...q->...", strain, self._params.stiffness, strain
        )

    def stress(self, F):
        return ddot(self._tangent, self._strain(F))

    def stress_and_tangent(self, F):
        stress = self.stress(F)
        tangent = np.broadcast_to(
            self._tangent, stress.shape[:-2] + (9, 9)
        )
        return stress, tangent

    def linearize(self, F):
        return self.stress(F), DenseTangent(self._tangent)

    def material_stiffness(self, F):
        return self._params.stiffness

    @property
    def stiffness_scale(self):
        return 0.5 * float(np.max(np.linalg.eigvalsh(self._params.stiffness)))


_LAWS_BY_PARAMS = {
    NeoHookeanParams: NeoHookeanLaw,
    LinearElasticParams: LinearElasticLaw,
}


def create_law(params: MaterialParams, logger=None) -> MaterialLaw:
    """Material law for mechanical parameters.

    Raises:
        BadMaterialParameters: Parameters do not describe a mechanical law.

    """
    law_class = _LAWS_BY_PARAMS.get(type(params))
    if law_class is None:
        raise BadMaterialParameters(
            f"'{params.__class__.__name__}' is not a mechanical material"
        )
    return law_class(params, logger)
