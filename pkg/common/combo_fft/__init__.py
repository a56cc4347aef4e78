"""FFT-based homogenization with composite boxels."""
from .exceptions import (
    ComboError,
    ArtifactFormatError,
)


__all__ = (
    "ComboError",
    "ArtifactFormatError",
)
