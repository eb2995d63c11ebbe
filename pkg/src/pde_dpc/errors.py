"""Exception hierarchy shared by all pde_dpc layers."""


class DPCError(Exception):
    """Base class for every error raised by pde_dpc."""


class ShapeError(DPCError, ValueError):
    """Operand shapes are incompatible."""


class TapeError(DPCError):
    """Backward pass requested on something the tape cannot differentiate."""


class ConfigurationError(DPCError, ValueError):
    """Configuration is valid syntactically but unusable numerically."""


class SolverError(DPCError):
    """Failure inside a time stepper.

    Attributes:
        step: Index of the time step that failed, when known.
    """

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step

    def at_step(self, step: int) -> "SolverError":
        """Return a copy of this error annotated with the failing step index."""
        return type(self)(f"step {step}: {self}", step=step)


class SingularSystemError(SolverError):
    """Zero pivot in a tridiagonal solve."""


class StabilityError(SolverError):
    """Explicit scheme would violate its stability bound."""


class ConvergenceError(SolverError):
    """Newton iteration did not reach the residual tolerance."""


class DivergenceError(SolverError):
    """Non-finite value produced by a step or an integrator stage."""


class DatasetError(DPCError):
    """Dataset generation, layout or contents are invalid."""


class ArtifactMismatchError(DPCError):
    """Artifacts were produced from incompatible experiment configurations."""


class UndefinedMetricError(DPCError, ValueError):
    """Metric is undefined for the given inputs (e.g. zero reference norm)."""
