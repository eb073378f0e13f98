"""Exception hierarchy.

Every error raised by this package derives from :class:`LcCooldownError`,
so callers can catch one base type.  The CLI maps the three branches to
distinct exit codes: configuration problems exit with 2, physically
inadmissible operating points (pull-in, unstable dynamics) with 3, and
numerical failures with 4.
"""


class LcCooldownError(Exception):
    """Base class for all package errors."""


class ConfigurationError(LcCooldownError):
    """Invalid, missing, or unknown configuration input."""


class DomainError(LcCooldownError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class PullInError(LcCooldownError):
    """Electrostatic pull-in: no stable mechanical equilibrium exists."""


class InstabilityError(LcCooldownError):
    """The linearized dynamics are not asymptotically stable."""


class NumericalError(LcCooldownError):
    """A numerical routine failed to converge or lost accuracy."""
