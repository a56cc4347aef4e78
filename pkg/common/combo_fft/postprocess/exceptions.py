from combo_fft.exceptions import ComboError


class ZeroReference(ComboError):
    """Reference value of a relative error has zero norm."""

    def __init__(self, norm=0.0):
        self.norm = norm
        super().__init__(
            f"Relative error needs a non-zero reference (norm {norm:.3e})"
        )


class IOFailure(ComboError):
    """Export or import of post-processing data failed.

    Args:
        path (str): Path of the file.
        reason (str): Human readable reason.
    """

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(f"Failed to process '{path}': {reason}")
