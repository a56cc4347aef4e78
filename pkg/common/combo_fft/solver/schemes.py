"""Fixed-point and Newton-Krylov solvers of the periodic cell problem."""
import logging
import time
from typing import Any, Dict, Optional, Tuple

import attr
import numpy as np
from scipy.sparse.linalg import LinearOperator, cg, minres

from combo_fft.materials import InadmissibleDeformation
from combo_fft.laminate import InadmissibleMacroState

from .config import MaterialEvaluation, Scheme, SolverConfig
from .dfmg import dfmg_evaluate
from .exceptions import CGBreakdown, SolverNoConvergence
from .green import GreenOperator
from .grid import SimGrid, field_mean, field_norm, pin_mean
from .material_map import EvaluationStats, MaterialMap
from .reference import ReferenceMedium, reference_medium


def _as_list(array):
    return np.asarray(array, dtype=float).tolist()


@attr.s
class StepReport(object):
    """Convergence data of one load step.

    Args:
        load_fraction (float): Fraction of the target load.
        F_bar (np.ndarray): Imposed macroscopic gradient.
        P_bar (np.ndarray): Resulting macroscopic stress.
        residuals (List[float]): Residual of every outer iteration.
        cg_iterations (int): Krylov iterations of the step.
        wall_time (float): Seconds spent in the step.
        alpha (float): Reference stiffness.
        laminate (EvaluationStats): Laminate statistics.
    """

    load_fraction = attr.ib(converter=float)
    F_bar = attr.ib()
    P_bar = attr.ib(default=None)
    residuals = attr.ib(factory=list)
    cg_iterations = attr.ib(default=0)
    wall_time = attr.ib(default=0.0)
    alpha = attr.ib(default=0.0)
    laminate = attr.ib(factory=EvaluationStats)

    @property
    def outer_iterations(self) -> int:
        return len(self.residuals)

    @property
    def residual(self) -> float:
        return self.residuals[-1] if self.residuals else float("inf")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "load_fraction": self.load_fraction,
            "F_bar": _as_list(self.F_bar),
            "P_bar": None if self.P_bar is None else _as_list(self.P_bar),
            "outer_iterations": self.outer_iterations,
            "cg_iterations": self.cg_iterations,
            "residuals": [float(item) for item in self.residuals],
            "alpha": self.alpha,
            "laminate_max_iterations": self.laminate.max_iterations,
            "laminate_back_projections": self.laminate.back_projections,
            "laminate_failures": self.laminate.failed,
            "composite_boxels": self.laminate.composite_count,
        }


@attr.s
class ConvergenceReport(object):
    """Reports of all accepted load steps of a solve."""

    steps = attr.ib(factory=list)
    bisections = attr.ib(default=0)

    @property
    def outer_iterations(self) -> int:
        return sum(step.outer_iterations for step in self.steps)

    @property
    def cg_iterations(self) -> int:
        return sum(step.cg_iterations for step in self.steps)

    @property
    def wall_time(self) -> float:
        return sum(step.wall_time for step in self.steps)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "steps": [step.to_dict() for step in self.steps],
            "bisections": self.bisections,
            "outer_iterations": self.outer_iterations,
            "cg_iterations": self.cg_iterations,
        }

    def timings(self) -> Dict[str, Any]:
        """Wall times, kept apart from the reproducible report."""
        return {
            "total": self.wall_time,
            "steps": [step.wall_time for step in self.steps],
        }


def equilibrium_residual(
    P: np.ndarray, green: GreenOperator, floor: float = 0.0
) -> float:
    """Relative equilibrium residual of a stress field.

    Root mean square of the compatible part of P, which vanishes for
    divergence-free stress, relative to the norm of the mean stress.

    Args:
        P (np.ndarray): Stress field (n1, n2, n3, 3, 3).
        green (GreenOperator): Operator of the discretization in use.
        floor (float): Lower limit of the normalization.

    Returns:
        float: ||G(P)||_rms / max(||<P>||_F, floor).

    """
    numerator = field_norm(green.project(P))
    denominator = max(float(np.linalg.norm(field_mean(P))), floor)
    if denominator <= 0.0:
        return 0.0 if numerator == 0.0 else float("inf")
    return numerator / denominator


class CellSolver:
    """Solver of the periodic cell problem under a macroscopic gradient.

    Args:
        grid (SimGrid): Simulation grid.
        material_map (MaterialMap): Materials of the cells.
        config (SolverConfig): Solver options.
        logger (Optional[logging.Logger]): Logger.

    """

    def __init__(
        self,
        grid: SimGrid,
        material_map: MaterialMap,
        config: Optional[SolverConfig] = None,
        logger=None,
    ):
        if config is None:
            config = SolverConfig()
        if logger is None:
            logger = logging.getLogger(self.__class__.__name__)
        self.log = logger
        if tuple(grid.dims) != tuple(material_map.dims):
            raise ValueError(
                f"Grid {grid.dims} does not match materials"
                f" {material_map.dims}"
            )
        self._grid = grid
        self._materials = material_map
        self._config = config
        self._green = GreenOperator(grid, config.green, logger=self.log)

    @property
    def grid(self) -> SimGrid:
        return self._grid

    @property
    def config(self) -> SolverConfig:
        return self._config

    @property
    def material_map(self) -> MaterialMap:
        return self._materials

    @property
    def green(self) -> GreenOperator:
        return self._green

    def snapshot(self):
        return self._materials.snapshot()

    def restore(self, snapshot):
        self._materials.restore(snapshot)

    def reference(self, F_bar: np.ndarray) -> ReferenceMedium:
        """Set alpha of the Green operator for one load step."""
        medium = reference_medium(self._materials.laws(), F_bar)
        self._green.alpha = medium.alpha
        return medium

    def evaluate(self, F: np.ndarray, tangent: bool = False):
        """Stress, tangent and laminate statistics of a gradient field."""
        if self._config.material_evaluation is MaterialEvaluation.DFMG:
            return dfmg_evaluate(F, self._materials, tangent)
        return self._materials.evaluate(F, tangent)

    def residual(self, P: np.ndarray) -> float:
        floor = self._config.residual_floor * self._green.alpha
        return equilibrium_residual(P, self._green, floor)

    def initial_field(self, F_bar, F0=None) -> np.ndarray:
        if F0 is None:
            return self._grid.homogeneous(F_bar)
        F = np.array(F0, dtype=float)
        return pin_mean(F, F_bar)

    def _finish(self, report, F, P, stats):
        if stats.failed:
            raise SolverNoConvergence(
                report.outer_iterations,
                report.residual,
                f"{stats.failed} composite boxels did not converge",
            )
        report.P_bar = field_mean(P)
        report.laminate = stats
        self.log.debug(
            f"Step {report.load_fraction:.4g} converged in"
            f" {report.outer_iterations} iterations"
            f" (residual {report.residual:.3e})"
        )
        return F, report

    def solve_basic(
        self, F_bar: np.ndarray, F0: Optional[np.ndarray] = None,
        load_fraction: float = 1.0,
    ) -> Tuple[np.ndarray, StepReport]:
        """Fixed-point iteration F <- F - G(P(F)) / alpha.

        Raises:
            SolverNoConvergence: Iteration budget exhausted.
            InadmissibleDeformation: det(F) <= 0 in a cell.

        """
        config = self._config
        started = time.perf_counter()
        F_bar = np.asarray(F_bar, dtype=float)
        medium = self.reference(F_bar)
        report = StepReport(load_fraction, F_bar, alpha=medium.alpha)
        F = self.initial_field(F_bar, F0)
        while True:
            P, _, stats = self.evaluate(F)
            report.residuals.append(self.residual(P))
            if report.residual <= config.tol_equilibrium:
                break
            if report.outer_iterations >= config.max_outer:
                raise SolverNoConvergence(
                    report.outer_iterations, report.residual
                )
            F -= self._green.apply(P)
            pin_mean(F, F_bar)
        report.wall_time = time.perf_counter() - started
        return self._finish(report, F, P, stats)

    def _krylov(self, tangent, rhs) -> Tuple[np.ndarray, int]:
        shape = self._grid.dims + (3, 3)
        size = rhs.size

        def _matvec(vector):
            field = tangent.apply(vector.reshape(shape))
            return self._green.apply(field).reshape(-1)

        operator = LinearOperator((size, size), matvec=_matvec, dtype=float)
        counter = {"iterations": 0}

        def _count(_vector):
            counter["iterations"] += 1

        config = self._config
        solution, info = cg(
            operator, rhs, rtol=config.cg_tol, maxiter=config.cg_max,
            callback=_count,
        )
        if info == 0:
            return solution, counter["iterations"]

        self.log.warning(
            f"CG failed with code {info}, trying MINRES"
        )
        solution, info = minres(
            operator, rhs, rtol=config.cg_tol, maxiter=config.cg_max,
            callback=_count,
        )
        if info != 0:
            raise CGBreakdown(info, counter["iterations"])
        return solution, counter["iterations"]

    def solve_newton(
        self, F_bar: np.ndarray, F0: Optional[np.ndarray] = None,
        load_fraction: float = 1.0,
    ) -> Tuple[np.ndarray, StepReport]:
        """Newton iteration with Krylov solves of the linearized problem.

        Raises:
            SolverNoConvergence: Iteration budget exhausted or no step
                length decreases the residual.
            CGBreakdown: Krylov solvers failed.
            InadmissibleDeformation: det(F) <= 0 in a cell at the first
                iterate.

        """
        config = self._config
        started = time.perf_counter()
        F_bar = np.asarray(F_bar, dtype=float)
        medium = self.reference(F_bar)
        report = StepReport(load_fraction, F_bar, alpha=medium.alpha)
        F = self.initial_field(F_bar, F0)
        P, tangent, stats = self.evaluate(F, tangent=True)
        report.residuals.append(self.residual(P))
        while report.residual > config.tol_equilibrium:
            if report.outer_iterations >= config.max_outer:
                raise SolverNoConvergence(
                    report.outer_iterations, report.residual
                )
            rhs = -self._green.apply(P).reshape(-1)
            direction, iterations = self._krylov(tangent, rhs)
            report.cg_iterations += iterations
            direction = direction.reshape(F.shape)

            snapshot = self.snapshot()
            step = 1.0
            accepted = False
            for _ in range(config.line_search_halvings + 1):
                trial = pin_mean(F + step * direction, F_bar)
                try:
                    values = self.evaluate(trial, tangent=True)
                except (InadmissibleDeformation, InadmissibleMacroState):
                    values = None
                if values is not None:
                    residual = self.residual(values[0])
                    if residual <= report.residual:
                        accepted = True
                        break
                self.restore(snapshot)
                step *= 0.5

            if not accepted:
                raise SolverNoConvergence(
                    report.outer_iterations,
                    report.residual,
                    "no step length decreased the residual",
                )
            if step < 1.0:
                self.log.debug(f"Newton step accepted with length {step}")
            F = trial
            P, tangent, stats = values
            report.residuals.append(residual)

        report.wall_time = time.perf_counter() - started
        return self._finish(report, F, P, stats)

    def solve(
        self, F_bar: np.ndarray, F0: Optional[np.ndarray] = None,
        load_fraction: float = 1.0,
    ) -> Tuple[np.ndarray, StepReport]:
        """Solve the cell problem with the configured scheme."""
        if self._config.scheme is Scheme.BASIC:
            return self.solve_basic(F_bar, F0, load_fraction)
        return self.solve_newton(F_bar, F0, load_fraction)


def _solve_with(scheme, F_bar, grid, material_map, config, F0):
    config = attr.evolve(config or SolverConfig(), scheme=scheme)
    solver = CellSolver(grid, material_map, config)
    return solver.solve(F_bar, F0)


def basic_scheme(
    F_bar: np.ndarray,
    grid: SimGrid,
    material_map: MaterialMap,
    config: Optional[SolverConfig] = None,
    F0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, StepReport]:
    """Solve a cell problem with the fixed-point scheme."""
    return _solve_with(Scheme.BASIC, F_bar, grid, material_map, config, F0)


def newton_cg(
    F_bar: np.ndarray,
    grid: SimGrid,
    material_map: MaterialMap,
    config: Optional[SolverConfig] = None,
    F0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, StepReport]:
    """Solve a cell problem with Newton-CG."""
    return _solve_with(
        Scheme.NEWTON_CG, F_bar, grid, material_map, config, F0
    )
