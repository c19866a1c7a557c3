"""Exception hierarchy for gridmdp."""

from typing import Any, Dict, List, Optional


class GridMdpError(Exception):
    """Base exception for all gridmdp errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}


class DimensionMismatchError(GridMdpError):
    """A vector does not match the counts declared by the GridSpec."""


class ConvergenceError(GridMdpError):
    """Newton iteration did not reach the residual tolerance."""

    def __init__(self, message: str, residual_norm: float, iterations: int):
        super().__init__(message, {"residual_norm": residual_norm, "iterations": iterations})
        self.residual_norm = residual_norm
        self.iterations = iterations


class InfeasibleScheduleError(GridMdpError):
    """The day-ahead dispatch violates a generator capacity or ramp limit."""

    def __init__(self, message: str, step: int, reason: str):
        super().__init__(message, {"step": step, "reason": reason})
        self.step = step
        self.reason = reason


class DegenerateDataError(GridMdpError):
    """Input data carries no usable information (e.g. a constant error series)."""


class ActionExhaustedError(GridMdpError):
    """No feasible discrete action exists for a state."""

    def __init__(self, message: str, k: Optional[int] = None):
        super().__init__(message, {"k": k})
        self.k = k


class ProtocolError(GridMdpError):
    """An operation was called with arguments inconsistent with the tree."""


class ConfigurationError(GridMdpError):
    """Scenario or grid configuration is invalid or references missing files."""


class DataFormatError(GridMdpError):
    """A data file does not follow its documented schema."""

    def __init__(self, message: str, path: str, diagnostics: List[str]):
        super().__init__(message, {"path": path, "diagnostics": diagnostics})
        self.path = path
        self.diagnostics = diagnostics

    def __str__(self) -> str:
        lines = [super().__str__()]
        lines.extend(f"  {d}" for d in self.diagnostics)
        return "\n".join(lines)
