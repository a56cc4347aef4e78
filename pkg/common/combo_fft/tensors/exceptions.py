from combo_fft.exceptions import ComboError


class SingularMatrix(ComboError):
    """Matrix cannot be inverted.

    Args:
        determinant (float): Smallest absolute determinant found.
        count (int): How many matrices of a batch are singular.
    """

    def __init__(self, determinant, count=1):
        self.determinant = determinant
        self.count = count
        super().__init__(
            f"Singular matrix (|det| = {determinant:.3e},"
            f" {count} matrices affected)"
        )


class NotSymmetric(ComboError):
    """Input of a symmetric routine is not symmetric.

    Args:
        asymmetry (float): Relative Frobenius norm of the skew part.
    """

    def __init__(self, asymmetry):
        self.asymmetry = asymmetry
        super().__init__(
            f"Matrix is not symmetric (relative skew norm {asymmetry:.3e})"
        )
