"""Exception hierarchy shared across the package."""


class FinslercError(Exception):
    """Base class for all errors raised by this package."""


class MetricSyntaxError(FinslercError):
    """Bad token or structure in a metric expression.

    Carries 1-based ``line`` and ``column`` of the offending character.
    """

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownSymbol(FinslercError):
    """Coordinate index out of range or undefined function name."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class DimensionError(FinslercError):
    """Dimension below the standing hypothesis n >= 3."""


class DomainError(FinslercError):
    """Evaluation left the admissible region (sqrt/log of a non-positive
    value, division by zero, y = 0, ...)."""


class HomogeneityViolation(FinslercError):
    """F(x, lambda*y) != lambda * F(x, y) beyond tolerance."""

    def __init__(self, message, point=None, scale=None):
        super().__init__(message)
        self.point = point
        self.scale = scale


class OrderExceeded(FinslercError):
    """A partial derivative beyond the retained truncation order was requested."""


class VarianceMismatch(FinslercError):
    """Tensor slots incompatible with the requested operation."""


class SingularMetric(FinslercError):
    """Fundamental tensor numerically singular at the evaluation point."""


class NotPositiveDefinite(FinslercError):
    """Fundamental tensor has non-positive eigenvalues at the point."""

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class NotSelfAdjoint(FinslercError):
    """Operator is not self-adjoint with respect to the metric."""


class ZeroTensor(FinslercError):
    """A classification that requires a non-zero tensor was applied to a
    numerically vanishing one."""


class ZeroRicci(ZeroTensor):
    """Ricci-based classification applied where Ric vanishes."""


class AsymmetricA(FinslercError):
    """Candidate associated tensor is not symmetric."""


class ConfigError(FinslercError):
    """Malformed run configuration or metric input file."""
