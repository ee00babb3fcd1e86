"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ModelError, ValueError):
    """An input value is non-finite or outside its declared range."""


class RegimeError(ModelError, ValueError):
    """Parameters violate the operating regime required by an operation.

    The message states the violated inequality, e.g. ``epsilon >= kappa/2``.
    """


class DomainError(ModelError, ValueError):
    """A closed-form expression is evaluated where a denominator vanishes."""


class DegenerateError(DomainError):
    """An otherwise well-posed query degenerates to a trivial answer."""


class StepSizeError(ModelError, RuntimeError):
    """The requested fixed step is too large for a stable integration."""


class TraceDriftError(ModelError, RuntimeError):
    """Density-matrix trace drifted beyond tolerance during propagation."""


class MultiplicityError(ModelError, RuntimeError):
    """A steady-state solve found a degenerate (multi-dimensional) kernel."""
