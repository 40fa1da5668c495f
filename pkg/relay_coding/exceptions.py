"""Error types raised by the relay_coding package.

All errors derive from ``ValueError`` so callers that only guard against bad
arguments keep working.
"""

from typing import Any, List, Optional, Tuple


class RelayCodingError(ValueError):
    """Base class for every error raised by relay_coding"""


class ConfigurationError(RelayCodingError):
    """Invalid network, strategy or run configuration.

    ``violations`` lists ``(field_path, message)`` pairs, one per broken rule.
    """

    def __init__(self, message: str, violations: Optional[List[Tuple[str, str]]] = None):
        super().__init__(message)
        self.violations = list(violations or [])

    @classmethod
    def from_validation_error(cls, err: Any, prefix: str = "") -> "ConfigurationError":
        """Build from a pydantic ``ValidationError`` keeping dotted field paths"""
        violations = []
        for item in err.errors():
            path = ".".join(str(part) for part in item.get("loc", ()))
            if prefix:
                path = f"{prefix}.{path}" if path else prefix
            violations.append((path, item.get("msg", "")))
        summary = "; ".join(f"{path}: {msg}" for path, msg in violations)
        return cls(f"invalid configuration: {summary}", violations)


class DegenerateCovarianceError(RelayCodingError):
    """Covariance block could not be factorized even after jitter"""


class InfeasibleStrategyError(RelayCodingError):
    """A fixed decode set violates its feasibility (Υ) constraints"""

    def __init__(self, message: str, T=None, S=None, value: Optional[float] = None):
        super().__init__(message)
        self.T = T
        self.S = S
        self.value = value


class EnumerationCapError(RelayCodingError):
    """Subset or layering enumeration would exceed the configured cap"""


class BracketError(RelayCodingError):
    """Bisection bracket does not contain a sign change"""
