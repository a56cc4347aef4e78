from combo_fft.exceptions import ComboError


class ArgValueError(Exception):
    def __init__(self, message, param_hint=None):
        super().__init__(message)
        self.message = message
        self.param_hint = param_hint


class ConfigInvalid(ComboError):
    """Run configuration failed validation.

    Args:
        key (str): Dotted key of the invalid entry.
        reason (str): Human readable reason.
    """

    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        super().__init__(f"Invalid config value '{key}': {reason}")


class UpstreamArtifactMissing(ComboError):
    """Artifact of an earlier pipeline stage is missing or unreadable.

    Args:
        filepath (str): Expected artifact path.
        stage (str): Command producing the artifact.
        reason (Optional[str]): Additional detail.
    """

    def __init__(self, filepath, stage, reason=None):
        self.filepath = filepath
        self.stage = stage
        self.reason = reason
        message = f"Missing '{filepath}', run '{stage}' first"
        if reason:
            message += f" ({reason})"
        super().__init__(message)


class SolverFailed(ComboError):
    """Cell problem could not be solved."""

    def __init__(self, cause):
        self.cause = cause
        super().__init__(
            f"Solver failed: {cause.__class__.__name__}: {cause}"
        )
