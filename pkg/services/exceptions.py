"""Exception hierarchy shared by every simulator service."""

from typing import Optional


class ValveSimError(Exception):
    """Base exception for simulator errors."""
    pass


class InvalidInputError(ValveSimError, ValueError):
    """Input rejected: dimension mismatch, non-finite entry or out-of-range parameter."""
    pass


class NumericalError(ValveSimError):
    """Internal numerical failure, e.g. the eigensolver did not converge."""

    def __init__(self, message: str, fingerprint: Optional[str] = None):
        self.fingerprint = fingerprint
        if fingerprint:
            message = f"{message} (matrix {fingerprint})"
        super().__init__(message)


class DegenerateStepError(ValveSimError):
    """Nothing arrived at the chain end on a step where the target is still empty."""

    def __init__(self, step: int, message: str = "no amplitude arrived at the chain end"):
        self.step = step
        super().__init__(f"step {step}: {message}")


class ScheduleFormatError(ValveSimError):
    """Malformed schedule file."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"schedule line {line}: {message}")


class ConfigParseError(ValveSimError):
    """Malformed experiment configuration."""

    def __init__(self, line: Optional[int], key: Optional[str], message: str):
        self.line = line
        self.key = key
        where = f"line {line}" if line is not None else "config"
        if key:
            where = f"{where}, key '{key}'"
        super().__init__(f"{where}: {message}")


class ArtifactIOError(ValveSimError):
    """Artifact file could not be read or written."""
    pass
