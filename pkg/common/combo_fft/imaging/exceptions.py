from combo_fft.exceptions import ComboError


class BadShapeSpec(ComboError):
    """Geometry definition cannot be used to generate an image."""

    def __init__(self, shape, reason):
        self.shape = shape
        self.reason = reason
        super().__init__(f"Invalid shape '{shape}': {reason}")


class NonDividingFactor(ComboError):
    """Coarsening factor does not divide the image dimension.

    Args:
        axis (int): Axis index.
        size (int): Image dimension along the axis.
        factor (int): Requested factor.
    """

    def __init__(self, axis, size, factor):
        self.axis = axis
        self.size = size
        self.factor = factor
        super().__init__(
            f"Factor {factor} does not divide dimension {size}"
            f" of axis {axis}"
        )


class BadCoarseningFactors(ComboError):
    """Coarsening needs one factor per image axis."""

    def __init__(self, factors):
        self.factors = factors
        super().__init__(
            f"Expected 3 coarsening factors, got {list(factors)}"
        )


class DegenerateBarycenters(ComboError):
    """Phase barycenters of a composite boxel coincide."""

    def __init__(self, distance, index=None):
        self.distance = distance
        self.index = index
        location = "" if index is None else f" in boxel {tuple(index)}"
        super().__init__(
            f"Phase barycenters coincide{location}"
            f" (distance {distance:.3e})"
        )


class TooFewInterfaceVoxels(ComboError):
    """Composite boxel has less than three interface voxels."""

    def __init__(self, count, index=None):
        self.count = count
        self.index = index
        location = "" if index is None else f" in boxel {tuple(index)}"
        super().__init__(
            f"Only {count} interface voxels{location}, at least 3 needed"
        )
