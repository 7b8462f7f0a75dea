"""Exception hierarchy shared by every vmbpol module."""


class VmbError(Exception):
    """Base class for all vmbpol errors."""

    code = "error"
    exit_code = 1


class DomainError(VmbError, ValueError):
    """An argument lies outside the domain where a formula is defined."""

    code = "domain"
    exit_code = 6


class SingularityError(VmbError, ArithmeticError):
    code = "singular"
    exit_code = 6


class ResolutionError(VmbError, ValueError):
    """The record is too short to separate the spectral lines."""

    code = "resolution"
    exit_code = 5


class ModulationAbsentError(VmbError, ValueError):
    """The 2 nu_mod carrier line is zero, so the ratio estimator is undefined."""

    code = "modulation_absent"
    exit_code = 5


class ConfigError(VmbError, ValueError):
    """Configuration failed validation.

    All violations are collected in ``errors`` as ``(key_path, message)`` pairs
    so a user can fix a config file in one pass.
    """

    code = "config"
    exit_code = 4

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [("", errors)]
        self.errors = list(errors)
        lines = [f"{path or '<root>'}: {msg}" for path, msg in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


class DataIOError(VmbError, OSError):
    code = "io"
    exit_code = 3
