"""Exception types shared across the toolkit.

The CLI maps these onto distinct exit codes, so keep the taxonomy coarse:
configuration problems, numerical failures, and data-format/IO problems.
"""


class CondscatError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CondscatError):
    """Inconsistent or unsupported configuration (bad shapes, flags, ranges)."""


class DomainError(ConfigError):
    """Argument outside the supported evaluation envelope."""


class NumericalError(CondscatError):
    """A computation failed or produced meaningless results."""


class SingularModeError(NumericalError):
    """The 2x2 modal system is singular for some mode."""

    def __init__(self, mode: int, k: float):
        self.mode = mode
        self.k = k
        super().__init__(
            f"modal system singular for mode p={mode} at wavenumber k={k}; "
            "this wavenumber is an interior resonance of the modal system"
        )


class SingularSystemError(NumericalError):
    """The assembled collocation system is numerically singular."""

    def __init__(self, k: float, cond: float):
        self.k = k
        self.cond = cond
        super().__init__(
            f"collocation system numerically singular at k={k} "
            f"(condition estimate {cond:.3e} > 1e14)"
        )


class DataFormatError(CondscatError):
    """Malformed or inconsistent data file."""
