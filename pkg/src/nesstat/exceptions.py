"""Exception types shared across the package."""


class NesstatError(Exception):
    """Base class for package-specific failures."""


class ConfigError(NesstatError):
    """Invalid experiment configuration or unknown preset."""


class ConvergenceError(NesstatError):
    """Krylov solver failed to reach the requested residual."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class DegeneracyError(NesstatError):
    """Zero eigenvalue of the Liouvillian (or oracle kernel) is degenerate.

    Usually means a weak symmetry was not fully broken; spacing statistics
    of a symmetry mixture would be spuriously Poissonian.
    """


class PartialResultError(NesstatError):
    """Fewer qualifying decay modes were found than requested."""

    def __init__(self, message, modes):
        super().__init__(message)
        self.modes = modes


class SampleSizeError(NesstatError):
    """Too few levels or spacings for the requested statistic."""


class EmptySpectrumError(NesstatError):
    """All block eigenvalues fell below the zero cutoff."""
