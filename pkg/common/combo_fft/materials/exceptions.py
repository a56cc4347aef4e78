import numpy as np

from combo_fft.exceptions import ComboError


class InadmissibleDeformation(ComboError):
    """Deformation gradient with non-positive determinant.

    Args:
        indices (np.ndarray): Flat indices of offending evaluation points.
        min_det (float): Smallest determinant found.
    """

    def __init__(self, indices, min_det):
        self.indices = np.asarray(indices, dtype=int)
        self.min_det = min_det
        preview = ", ".join(str(idx) for idx in self.indices[:5])
        if self.indices.size > 5:
            preview += ", ..."
        super().__init__(
            f"det(F) <= 0 at {self.indices.size} points"
            f" (min det {min_det:.3e}; indices {preview})"
        )


class BadMaterialParameters(ComboError):
    """Material definition is invalid."""
    pass
