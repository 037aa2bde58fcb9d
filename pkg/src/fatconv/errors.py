"""Exception hierarchy shared by the library and the CLI."""


class FatconvError(Exception):
    """Base class for all library errors."""

    exit_code = 4


class InvalidArgument(FatconvError, ValueError):
    exit_code = 2


class InvalidSample(InvalidArgument):
    """A sample refers to domain columns the class does not have."""


class SizeLimitError(FatconvError):
    """An exact computation would exceed its configured enumeration cap."""

    exit_code = 3


class ConfigError(InvalidArgument):
    exit_code = 2


class InvariantViolation(FatconvError):
    """A structure failed one of its own post-conditions."""

    exit_code = 4
