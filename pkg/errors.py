"""
Error types shared by every module.

Domain failures derive from ``ObsGameError`` so the command line can map them
to a single exit code; ``ScenarioError`` marks bad input files (exit code 2).
``HypothesisViolated`` is a warning category, never raised as an error.
"""


class ObsGameError(Exception):
    """Base class for errors raised by the library."""


class ShapeMismatch(ObsGameError, ValueError):
    """Matrix dimensions do not fit the requested operation."""


class NonRationalSpectrum(ObsGameError):
    """Characteristic polynomial has an irreducible factor of degree >= 2 over Q."""

    def __init__(self, message, factor=None, epoch=None):
        super().__init__(message)
        self.factor = factor
        self.epoch = epoch

    def __str__(self):
        base = super().__str__()
        if self.epoch is not None:
            return f"epoch {self.epoch}: {base}"
        return base


class NotInvariant(ObsGameError):
    """Subspace V fails A V within V + Im B, so no friend exists."""


class NoRelativeDegree(ObsGameError):
    """Output channels have no (vector) relative degree with nonsingular L."""


class ScenarioError(ObsGameError, ValueError):
    """Malformed scenario file or matrix literal."""

    def __init__(self, message, line=None, column=None, source=None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.source = source

    def __str__(self):
        where = ''
        if self.source:
            where += f"{self.source}:"
        if self.line is not None:
            where += f"{self.line}:{self.column}:"
        base = super().__str__()
        return f"{where} {base}" if where else base


class HypothesisViolated(UserWarning):
    """Im B2 is not contained in V*(A0, B1, C0); the reduction is still returned."""
