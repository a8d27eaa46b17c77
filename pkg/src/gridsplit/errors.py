"""Exception types shared across the package."""


class GridFormatError(ValueError):
    """Malformed grid file; carries the 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class DisconnectedGridError(ValueError):
    """The base network is not a single connected component."""


class SingularSystemError(RuntimeError):
    """The reduced susceptance matrix could not be factorized or solved."""


class OutageError(RuntimeError):
    """A single-branch outage update could not be computed."""

    def __init__(self, branch: int, message: str):
        super().__init__(f"branch {branch}: {message}")
        self.branch = branch


class BridgeOutageError(OutageError):
    """Outage of a grid-splitting branch: the compensation denominator vanishes."""


class DegenerateOutageError(OutageError):
    """Compensation denominator below tolerance on a non-splitting branch."""
