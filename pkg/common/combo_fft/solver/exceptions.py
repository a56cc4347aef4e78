from combo_fft.exceptions import ComboError


class SolverNoConvergence(ComboError):
    """Outer iterations did not reach the equilibrium tolerance.

    Args:
        iterations (int): Outer iterations performed.
        residual (float): Last equilibrium residual.
        reason (Optional[str]): Additional detail.
    """

    def __init__(self, iterations, residual, reason=None):
        self.iterations = iterations
        self.residual = residual
        self.reason = reason
        message = (
            f"Cell problem not converged after {iterations} iterations"
            f" (residual {residual:.3e})"
        )
        if reason:
            message += f": {reason}"
        super().__init__(message)


class CGBreakdown(ComboError):
    """Krylov solve of the linearized cell problem failed."""

    def __init__(self, info, iterations):
        self.info = info
        self.iterations = iterations
        super().__init__(
            f"Krylov solver failed with code {info}"
            f" after {iterations} iterations"
        )


class LoadPathFailed(ComboError):
    """Load step could not be completed within the bisection budget."""

    def __init__(self, load_fraction, bisections, cause=None):
        self.load_fraction = load_fraction
        self.bisections = bisections
        self.cause = cause
        message = (
            f"Load step towards fraction {load_fraction:.6g} failed"
            f" after {bisections} bisections"
        )
        if cause is not None:
            message += f" ({cause})"
        super().__init__(message)


class IncompatibleSolverConfig(ComboError):
    """Solver options cannot be combined."""

    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"Incompatible solver configuration: {reason}")
