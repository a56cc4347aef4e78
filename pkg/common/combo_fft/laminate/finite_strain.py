"""Finite-strain laminate kernel of composite boxels.

Phase gradients follow the rank-1 parameterization

    F± = F□ ± (a ⊗ N) / c±

and the jump vector a is found by Newton-Raphson on the traction residual
f(a) = (P+ − P−) N. Iterates leaving the admissible set J± > 0 are
projected back into it using the matrix determinant lemma.

Kernels are batched: the leading axis of every array is the boxel index.
"""
import logging
from typing import Optional, Tuple

import attr
import numpy as np

from combo_fft.tensors import det3, inv3, adjugate3
from combo_fft.materials import MaterialLaw

from .exceptions import NoConvergence, InadmissibleMacroState
from .structures import (
    ComboMeta,
    JumpVectorState,
    LaminateResult,
    LaminateBatch,
)

HESSIAN_SINGULAR_THRESHOLD = 1e-300


@attr.s(frozen=True)
class LaminateTolerance(object):
    """Convergence settings of the laminate Newton-Raphson.

    Args:
        tol_rel (float): Relative tolerance on the traction residual.
        tol_abs (float): Absolute tolerance added to the relative one.
        floor_factor (float): Stress floor relative to the largest phase
            shear-like modulus.
        max_iter (int): Maximum number of Newton updates.
        back_projection (bool): Project inadmissible iterates back.
        c_min (float): Boxels with min(c+, c−) below this use the Voigt
            rule. Zero disables the switch.
    """

    tol_rel = attr.ib(default=1e-10, converter=float)
    tol_abs = attr.ib(default=0.0, converter=float)
    floor_factor = attr.ib(default=1e-12, converter=float)
    max_iter = attr.ib(default=50, converter=int)
    back_projection = attr.ib(default=True, converter=bool)
    c_min = attr.ib(default=0.0, converter=float)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def jump_matrix(normal: np.ndarray) -> np.ndarray:
    """Matrix D with vec(a ⊗ N) = D a, D[(i,J),k] = δ_ik N_J.

    Args:
        normal (np.ndarray): Normals (..., 3).

    Returns:
        np.ndarray: Matrices (..., 9, 3).

    """
    normal = np.asarray(normal, dtype=float)
    full = np.einsum("ik,...J->...iJk", np.eye(3), normal)
    return full.reshape(normal.shape[:-1] + (9, 3))


def phase_gradients(F_box, a, normal, c_plus):
    """Phase gradients F± of the rank-1 parameterization."""
    c_plus = np.asarray(c_plus, dtype=float)
    jump = np.einsum("...i,...J->...iJ", a, normal)
    return (
        F_box + jump / c_plus[..., None, None],
        F_box - jump / (1.0 - c_plus)[..., None, None],
    )


def traction_residual(P_plus, P_minus, normal):
    """Residual f = (P+ − P−) N."""
    return np.einsum("...iJ,...J->...i", P_plus - P_minus, normal)


def jump_hessian(A_plus, A_minus, normal, c_plus):
    """Hessian Δf = Dᵀ (A+/c+ + A−/c−) D of the traction residual."""
    c_plus = np.asarray(c_plus, dtype=float)[..., None, None]
    jump = jump_matrix(normal)
    weighted = A_plus / c_plus + A_minus / (1.0 - c_plus)
    return np.einsum("...pi,...pq,...qk->...ik", jump, weighted, jump)


def effective_tangent(A_plus, A_minus, normal, c_plus):
    """Consistent tangent of converged composite boxels.

    A□ = (c+A+ + c−A−) − δA D Δf⁻¹ Dᵀ δA with δA = A+ − A−.

    Args:
        A_plus (np.ndarray): Phase + tangents (..., 9, 9).
        A_minus (np.ndarray): Phase − tangents (..., 9, 9).
        normal (np.ndarray): Normals (..., 3).
        c_plus (np.ndarray): Volume fractions of phase + (...).

    Returns:
        np.ndarray: Effective tangents (..., 9, 9).

    Raises:
        SingularMatrix: Hessian of any boxel is singular.

    """
    c_plus = np.asarray(c_plus, dtype=float)
    weight = c_plus[..., None, None]
    jump = jump_matrix(normal)
    hessian_inv = inv3(jump_hessian(A_plus, A_minus, normal, c_plus))
    contrast = A_plus - A_minus
    left = np.einsum("...pq,...qk->...pk", contrast, jump)
    right = np.einsum("...qk,...qp->...kp", jump, contrast)
    correction = np.einsum(
        "...pk,...kl,...lq->...pq", left, hessian_inv, right
    )
    return weight * A_plus + (1.0 - weight) * A_minus - correction


def _bounds(F_box, normal, c_plus):
    determinant = det3(F_box)
    bad = ~(determinant > 0.0)
    if np.any(bad):
        raise InadmissibleMacroState(
            float(np.min(determinant)), int(np.count_nonzero(bad))
        )
    direction = np.einsum("...Ji,...J->...i", inv3(F_box), normal)
    length = np.linalg.norm(direction, axis=-1)
    c_plus = np.asarray(c_plus, dtype=float)
    return (
        direction / length[..., None],
        -c_plus / length,
        (1.0 - c_plus) / length,
    )


def admissibility_bounds(
    F_box: np.ndarray, meta: ComboMeta
) -> Tuple[np.ndarray, float, float]:
    """Direction and bounds of the admissible jump set.

    Any a with β+ < a·m_β < β− gives J± > 0, where
    m_β = F□⁻ᵀN / ‖F□⁻ᵀN‖ and β± = ∓c± / ‖F□⁻ᵀN‖.

    Args:
        F_box (np.ndarray): Boxel deformation gradient.
        meta (ComboMeta): Normal and volume fractions.

    Returns:
        Tuple[np.ndarray, float, float]: m_β, β+ and β−.

    Raises:
        InadmissibleMacroState: det(F□) <= 0.

    """
    m_beta, beta_plus, beta_minus = _bounds(
        np.asarray(F_box, dtype=float), meta.normal, meta.c_plus
    )
    return m_beta, float(beta_plus), float(beta_minus)


def back_project(a1, a0, m_beta, beta_plus, beta_minus):
    """Project inadmissible iterate a1 back into the admissible set.

    The component along m_β is replaced by the midpoint of the previous
    admissible value a0·m_β and the violated bound; the orthogonal
    component of a1 is kept.
    """
    a1 = np.asarray(a1, dtype=float)
    a0 = np.asarray(a0, dtype=float)
    beta_1 = np.sum(a1 * m_beta, axis=-1)
    beta_0 = np.sum(a0 * m_beta, axis=-1)
    critical = np.where(beta_1 <= beta_plus, beta_plus, beta_minus)
    beta_star = 0.5 * (beta_0 + critical)
    return a1 + (beta_star - beta_1)[..., None] * m_beta


def _is_admissible(a, m_beta, beta_plus, beta_minus):
    beta = np.sum(a * m_beta, axis=-1)
    return (beta_plus < beta) & (beta < beta_minus)


class LaminateSolver:
    """Batched Newton-Raphson solver of composite boxel laminates.

    Args:
        law_plus (MaterialLaw): Law of phase +.
        law_minus (MaterialLaw): Law of phase −.
        tolerance (Optional[LaminateTolerance]): Convergence settings.
        logger (Optional[logging.Logger]): Logger.

    """

    def __init__(
        self,
        law_plus: MaterialLaw,
        law_minus: MaterialLaw,
        tolerance: Optional[LaminateTolerance] = None,
        logger=None,
    ):
        if tolerance is None:
            tolerance = LaminateTolerance()
        if logger is None:
            logger = logging.getLogger(self.__class__.__name__)
        self.log = logger
        self._law_plus = law_plus
        self._law_minus = law_minus
        self._tolerance = tolerance
        self._stress_floor = tolerance.floor_factor * max(
            law_plus.stiffness_scale, law_minus.stiffness_scale
        )

    @property
    def tolerance(self) -> LaminateTolerance:
        return self._tolerance

    def _evaluate(self, F_box, a, normal, c_plus):
        F_plus, F_minus = phase_gradients(F_box, a, normal, c_plus)
        P_plus, A_plus = self._law_plus.stress_and_tangent(F_plus)
        P_minus, A_minus = self._law_minus.stress_and_tangent(F_minus)
        return F_plus, F_minus, P_plus, P_minus, A_plus, A_minus

    def _tolerance_for(self, P_plus, P_minus, normal):
        scale = np.maximum(
            np.linalg.norm(np.einsum("...iJ,...J->...i", P_plus, normal),
                           axis=-1),
            np.linalg.norm(np.einsum("...iJ,...J->...i", P_minus, normal),
                           axis=-1),
        )
        scale = np.maximum(scale, self._stress_floor)
        return self._tolerance.tol_abs + self._tolerance.tol_rel * scale

    def solve(
        self,
        F_box: np.ndarray,
        normal: np.ndarray,
        c_plus: np.ndarray,
        a0: Optional[np.ndarray] = None,
        tangent: bool = True,
    ) -> LaminateBatch:
        """Solve the laminate problem of many composite boxels.

        Boxels that fail to converge keep their best iterate and are
        flagged in the returned batch instead of raising.

        Args:
            F_box (np.ndarray): Boxel gradients (n, 3, 3).
            normal (np.ndarray): Unit normals (n, 3).
            c_plus (np.ndarray): Volume fractions of phase + (n, ).
            a0 (Optional[np.ndarray]): Warm start jump vectors (n, 3).
            tangent (bool): Compute effective tangents.

        Returns:
            LaminateBatch: Solution of all boxels.

        Raises:
            InadmissibleMacroState: det(F□) <= 0 in any boxel.

        """
        F_box = np.asarray(F_box, dtype=float).reshape(-1, 3, 3)
        normal = np.asarray(normal, dtype=float).reshape(-1, 3)
        c_plus = np.asarray(c_plus, dtype=float).reshape(-1)
        count = F_box.shape[0]
        tol = self._tolerance

        m_beta, beta_plus, beta_minus = _bounds(F_box, normal, c_plus)
        if a0 is None:
            a = np.zeros((count, 3))
        else:
            a = np.array(a0, dtype=float).reshape(count, 3)
            bad = ~_is_admissible(a, m_beta, beta_plus, beta_minus)
            if np.any(bad):
                self.log.debug(
                    f"Projecting {np.count_nonzero(bad)} inadmissible"
                    " warm starts"
                )
                a[bad] = back_project(
                    a[bad], np.zeros((np.count_nonzero(bad), 3)),
                    m_beta[bad], beta_plus[bad], beta_minus[bad]
                )

        voigt = np.minimum(c_plus, 1.0 - c_plus) < tol.c_min
        a[voigt] = 0.0

        F_plus = np.empty((count, 3, 3))
        F_minus = np.empty((count, 3, 3))
        P_plus = np.empty((count, 3, 3))
        P_minus = np.empty((count, 3, 3))
        A_plus = np.empty((count, 9, 9))
        A_minus = np.empty((count, 9, 9))
        residual = np.full(count, np.inf)
        iterations = np.zeros(count, dtype=int)
        back_projections = np.zeros(count, dtype=int)
        converged = voigt.copy()
        best_a = a.copy()
        best_residual = np.full(count, np.inf)

        def _store(idx, values):
            F_plus[idx], F_minus[idx] = values[0], values[1]
            P_plus[idx], P_minus[idx] = values[2], values[3]
            A_plus[idx], A_minus[idx] = values[4], values[5]

        if np.any(voigt):
            idx = np.flatnonzero(voigt)
            _store(idx, self._evaluate(
                F_box[idx], a[idx], normal[idx], c_plus[idx]
            ))
            residual[idx] = 0.0

        active = ~voigt
        for step in range(tol.max_iter + 1):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            values = self._evaluate(
                F_box[idx], a[idx], normal[idx], c_plus[idx]
            )
            _store(idx, values)
            f = traction_residual(values[2], values[3], normal[idx])
            norm = np.linalg.norm(f, axis=-1)
            residual[idx] = norm

            improved = norm < best_residual[idx]
            best_residual[idx[improved]] = norm[improved]
            best_a[idx[improved]] = a[idx[improved]]

            done = norm <= self._tolerance_for(
                values[2], values[3], normal[idx]
            )
            converged[idx[done]] = True
            active[idx[done]] = False
            if step == tol.max_iter:
                break

            pending = ~done
            idx = idx[pending]
            if idx.size == 0:
                break
            hessian = jump_hessian(
                values[4][pending], values[5][pending],
                normal[idx], c_plus[idx]
            )
            determinant = det3(hessian)
            singular = np.abs(determinant) <= HESSIAN_SINGULAR_THRESHOLD
            if np.any(singular):
                active[idx[singular]] = False
                idx = idx[~singular]
                hessian = hessian[~singular]
                determinant = determinant[~singular]
                f = f[pending][~singular]
            else:
                f = f[pending]

            update = -np.einsum(
                "nik,nk->ni", adjugate3(hessian), f
            ) / determinant[:, None]
            trial = a[idx] + update
            inadmissible = ~_is_admissible(
                trial, m_beta[idx], beta_plus[idx], beta_minus[idx]
            )
            if np.any(inadmissible):
                if tol.back_projection:
                    rows = idx[inadmissible]
                    trial[inadmissible] = back_project(
                        trial[inadmissible], a[rows], m_beta[rows],
                        beta_plus[rows], beta_minus[rows]
                    )
                    back_projections[rows] += 1
                else:
                    # Naive update left the admissible set: boxel fails
                    active[idx[inadmissible]] = False
                    keep = ~inadmissible
                    idx = idx[keep]
                    trial = trial[keep]
            a[idx] = trial
            iterations[idx] += 1

        failed = ~converged
        if np.any(failed):
            idx = np.flatnonzero(failed)
            a[idx] = best_a[idx]
            residual[idx] = best_residual[idx]
            _store(idx, self._evaluate(
                F_box[idx], a[idx], normal[idx], c_plus[idx]
            ))
            self.log.warning(
                f"{idx.size} of {count} composite boxels did not converge"
                f" (worst residual {np.max(residual[idx]):.3e})"
            )

        weight = c_plus[:, None, None]
        P_box = weight * P_plus + (1.0 - weight) * P_minus
        traction_plus = np.einsum("niJ,nJ->ni", P_plus, normal)
        traction_minus = np.einsum("niJ,nJ->ni", P_minus, normal)
        traction = np.where(
            converged[:, None],
            traction_plus,
            0.5 * (traction_plus + traction_minus),
        )

        A_box = None
        if tangent:
            A_box = np.empty((count, 9, 9))
            if np.any(voigt):
                A_box[voigt] = (
                    weight[voigt] * A_plus[voigt]
                    + (1.0 - weight[voigt]) * A_minus[voigt]
                )
            laminate = ~voigt
            if np.any(laminate):
                A_box[laminate] = effective_tangent(
                    A_plus[laminate], A_minus[laminate],
                    normal[laminate], c_plus[laminate]
                )

        return LaminateBatch(
            a=a,
            F_plus=F_plus,
            F_minus=F_minus,
            P_plus=P_plus,
            P_minus=P_minus,
            P_box=P_box,
            A_box=A_box,
            traction=traction,
            converged=converged,
            iterations=iterations,
            residual=residual,
            back_projections=back_projections,
        )


def finite_strain_solve(
    F_box: np.ndarray,
    law_plus: MaterialLaw,
    law_minus: MaterialLaw,
    meta: ComboMeta,
    a0: Optional[np.ndarray] = None,
    tolerance: Optional[LaminateTolerance] = None,
) -> Tuple[LaminateResult, JumpVectorState]:
    """Solve the laminate problem of a single composite boxel.

    Args:
        F_box (np.ndarray): Boxel deformation gradient.
        law_plus (MaterialLaw): Law of phase +.
        law_minus (MaterialLaw): Law of phase −.
        meta (ComboMeta): Normal and volume fractions.
        a0 (Optional[np.ndarray]): Admissible warm start, zero by default.
        tolerance (Optional[LaminateTolerance]): Convergence settings.

    Returns:
        Tuple[LaminateResult, JumpVectorState]: Phase and effective
            response and the jump vector state.

    Raises:
        NoConvergence: Tolerance not reached, best state is attached.
        InadmissibleMacroState: det(F□) <= 0.

    """
    F_box = np.asarray(F_box, dtype=float).reshape(3, 3)
    solver = LaminateSolver(law_plus, law_minus, tolerance)
    if a0 is not None:
        a0 = np.asarray(a0, dtype=float).reshape(1, 3)
    batch = solver.solve(
        F_box[None], meta.normal[None], np.array([meta.c_plus]), a0
    )
    result = batch.result_at(0, F_box)
    state = batch.state_at(0)
    if not state.converged:
        raise NoConvergence(
            state.iterations, state.residual, best_state=(result, state)
        )
    return result, state
