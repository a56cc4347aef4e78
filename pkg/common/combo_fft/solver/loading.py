"""Incremental loading of the cell problem."""
import logging
from typing import Optional, Tuple

import enlighten
import numpy as np

from combo_fft.materials import InadmissibleDeformation
from combo_fft.laminate import InadmissibleMacroState
from combo_fft.imaging import rotation_matrix

from .exceptions import CGBreakdown, LoadPathFailed, SolverNoConvergence
from .schemes import CellSolver, ConvergenceReport

IDENTITY = np.eye(3)
# Fractions closer than this to the target finish the path.
FRACTION_EPS = 1e-12

RECOVERABLE_ERRORS = (
    SolverNoConvergence,
    CGBreakdown,
    InadmissibleDeformation,
    InadmissibleMacroState,
)

log = logging.getLogger(__name__)


def load_path(F_target: np.ndarray, fraction: float) -> np.ndarray:
    """Macroscopic gradient I + t (F_target - I) of a load fraction t."""
    return IDENTITY + fraction * (np.asarray(F_target) - IDENTITY)


def load_stepping(
    F_target: np.ndarray,
    steps: int,
    solver: CellSolver,
    max_bisections: Optional[int] = None,
    progress: bool = False,
) -> Tuple[np.ndarray, ConvergenceReport]:
    """Ramp the macroscopic gradient linearly from I to the target.

    Every step starts from the previous solution shifted by the change of
    the macroscopic gradient and from the previous laminate jump vectors.
    A failing step is halved and retried from the last accepted state. After
    an accepted step the increment doubles again, up to the initial one.

    Args:
        F_target (np.ndarray): Final macroscopic gradient.
        steps (int): Number of equal load increments.
        solver (CellSolver): Solver of single steps.
        max_bisections (Optional[int]): Consecutive halvings allowed for a
            step, solver configuration is used when not passed.
        progress (bool): Show a progress bar.

    Returns:
        Tuple[np.ndarray, ConvergenceReport]: Final gradient field and
            reports of all accepted steps.

    Raises:
        LoadPathFailed: Step failed after all bisections.

    """
    if steps < 1:
        raise ValueError(f"Number of load steps must be positive: {steps}")
    if max_bisections is None:
        max_bisections = solver.config.max_bisections

    F_target = np.asarray(F_target, dtype=float)
    report = ConvergenceReport()
    F_prev_bar = IDENTITY.copy()
    F = solver.initial_field(F_prev_bar)
    fraction = 0.0
    increment = 1.0 / steps
    cuts = 0

    progress_bar = None
    if progress:
        manager = enlighten.get_manager()
        progress_bar = manager.counter(
            total=100, desc="Load steps", units="%",
            color=(64, 128, 222)
        )

    while fraction < 1.0 - FRACTION_EPS:
        target = fraction + increment
        if target > 1.0 - FRACTION_EPS:
            target = 1.0
        F_bar = load_path(F_target, target)
        snapshot = solver.snapshot()
        try:
            F_new, step_report = solver.solve(
                F_bar, F + (F_bar - F_prev_bar), load_fraction=target
            )
        except RECOVERABLE_ERRORS as exc:
            solver.restore(snapshot)
            if cuts >= max_bisections:
                if progress_bar is not None:
                    progress_bar.close()
                raise LoadPathFailed(target, cuts, exc)
            cuts += 1
            report.bisections += 1
            increment *= 0.5
            log.info(
                f"Load step to {target:.6g} failed ({exc}),"
                f" retrying with increment {increment:.6g}"
            )
            continue

        cuts = 0
        increment = min(2.0 * increment, 1.0 / steps)
        if progress_bar is not None:
            percent = int(round(100 * target))
            progress_bar.update(percent - progress_bar.count)
        F = F_new
        F_prev_bar = F_bar
        fraction = target
        report.steps.append(step_report)

    if progress_bar is not None:
        progress_bar.close()
    return F, report


def rotated_loading(
    F_bar: np.ndarray, axis, angle: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Macroscopic gradient R F_bar of a rotated load case.

    Args:
        F_bar (np.ndarray): Unrotated macroscopic gradient.
        axis (Union[str, np.ndarray]): Rotation axis.
        angle (float): Rotation angle in degrees.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Rotated gradient and rotation.

    """
    rotation = rotation_matrix(axis, angle)
    return rotation @ np.asarray(F_bar, dtype=float), rotation


def rotate_stress(P_bar: np.ndarray, rotation: np.ndarray) -> np.ndarray:
    """Stress R P_bar of the rotated load case."""
    return rotation @ np.asarray(P_bar, dtype=float)
