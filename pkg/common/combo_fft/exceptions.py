class ComboError(Exception):
    """Base of all errors raised by combo_fft."""
    pass


class ArtifactFormatError(ComboError):
    """Artifact header is missing, malformed or of incompatible version.

    Args:
        filepath (str): Path to artifact header.
        reason (str): Human readable reason.
    """

    def __init__(self, filepath, reason):
        self.filepath = filepath
        self.reason = reason
        super().__init__(f"Invalid artifact '{filepath}': {reason}")
