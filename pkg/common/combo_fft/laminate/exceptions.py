from combo_fft.exceptions import ComboError


class BadLambda(ComboError):
    """Auxiliary parameter of the implicit laminate rule is too small.

    Args:
        value (float): Passed parameter.
        largest_eigenvalue (float): Largest eigenvalue of phase stiffnesses.
    """

    def __init__(self, value, largest_eigenvalue):
        self.value = value
        self.largest_eigenvalue = largest_eigenvalue
        super().__init__(
            f"Lambda {value:.6g} must be larger than the largest phase"
            f" stiffness eigenvalue {largest_eigenvalue:.6g}"
        )


class NoConvergence(ComboError):
    """Laminate Newton-Raphson did not reach the tolerance.

    Args:
        iterations (int): Performed iterations.
        residual (float): Best residual norm reached.
        best_state (Any): State of the best iterate.
    """

    def __init__(self, iterations, residual, best_state=None):
        self.iterations = iterations
        self.residual = residual
        self.best_state = best_state
        super().__init__(
            f"Laminate solve did not converge in {iterations} iterations"
            f" (best residual {residual:.3e})"
        )


class InadmissibleMacroState(ComboError):
    """Composite boxel gradient has non-positive determinant."""

    def __init__(self, determinant, count=1):
        self.determinant = determinant
        self.count = count
        super().__init__(
            f"det(F_box) <= 0 in {count} composite boxels"
            f" (min {determinant:.3e})"
        )
