"""Exceptions raised across the lab."""


class LabError(Exception):
    """Base class for every error the lab raises on purpose."""


class DomainError(LabError, ValueError):
    """Input lies outside the domain of an operation."""


class DimensionMismatchError(LabError, ValueError):
    pass


class NotPSDError(LabError, ValueError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"matrix is not PSD (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class EigenSolverError(LabError):
    def __init__(self, dim: int, reason: str = ""):
        message = f"Hermitian eigensolver failed on a {dim}x{dim} matrix"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)
        self.dim = dim


class NearSingularFrameError(LabError):
    """Σ X_i*X_i has an eigenvalue below the floor, so no rectifier exists."""

    def __init__(self, min_eigenvalue: float, n: int, k: int):
        super().__init__(
            f"near-singular frame: min eigenvalue of W is {min_eigenvalue:.3e} (n={n}, k={k})"
        )
        self.min_eigenvalue = min_eigenvalue


class RectifierUnavailableError(LabError):
    pass


class SizeGuardError(LabError, ValueError):
    pass


class PlanError(LabError, ValueError):
    """Bad plan file. Carries the offending line or field when known."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        elif field is not None:
            prefix = f"{field}: "
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field
