"""Exception hierarchy shared across lvwave."""


class LVWaveError(Exception):
    """Base class for all lvwave errors."""


class ConfigError(LVWaveError, ValueError):
    """Invalid model, kernel, grid or run configuration."""


class MomentDivergenceError(LVWaveError, ArithmeticError):
    """An exponential kernel moment does not exist at the requested rate."""


class PreconditionError(LVWaveError, ValueError):
    """Parameters violate a precondition (typically the bistability condition)."""


class DegenerateProblemError(LVWaveError, ArithmeticError):
    """A periodic linear problem has no unique periodic solution."""


class RootFindingError(LVWaveError, RuntimeError):
    """Bracketing or minimisation failed within the allowed search range."""


class ConstructionError(LVWaveError, RuntimeError):
    """A constructed certificate object fails its own verification."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SimulationError(LVWaveError, RuntimeError):
    """Time integration produced non-finite values."""


class FrontLostError(SimulationError):
    """The tracked level set of the front is missing or not unique."""
