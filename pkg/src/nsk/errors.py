"""Exception hierarchy shared across the package.

Two families: configuration/usage problems (``ConfigError``) and runtime
solver failures (``SolverError``).  The CLI maps them to exit codes 2 and 3.
"""


class NskError(Exception):
    """Base class for all package errors."""


class ConfigError(NskError):
    """Invalid configuration, argument, or domain violation."""


class DomainError(ConfigError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(NskError):
    """Value left the representable floating-point range (over/underflow)."""


class GridSizeError(ConfigError):
    """Grid construction would exceed the configured node cap."""


class SolverError(NskError):
    """Base class for runtime solver failures."""


class NonContractionError(SolverError):
    """Fixed-point iteration diverged (update grew repeatedly)."""


class PositivityError(SolverError):
    """Density lost positivity during an iteration."""


class NewtonDivergenceError(SolverError):
    """Newton iteration failed to converge."""


class NoRootError(SolverError):
    """Requested boundary slope is outside the attainable range."""


class WindowEmptyError(SolverError):
    """Decay-fit window contains no usable samples."""
