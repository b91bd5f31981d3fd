"""Exception types shared across the package."""


class AoiqError(Exception):
    """Base class for all package-specific errors."""


class NonPositiveRate(AoiqError):
    """An arrival or service rate was zero or negative."""


class SingularSystem(AoiqError):
    """A linear system was rank-deficient beyond the expected redundancy.

    For the balance equations this signals a non-ergodic occupancy chain;
    for the correlation equations it signals a model without a stationary
    age solution.
    """


class NegativeSolution(AoiqError):
    """The correlation solve produced entries below the round-off slack."""


class DomainError(AoiqError):
    """An argument lies outside the domain of a closed-form expression."""


class UnsupportedPolicy(AoiqError):
    """The requested policy has no analytic model; use the simulator."""


class InvalidConfig(AoiqError):
    """A simulation configuration violates its invariants."""


class IllegalEvent(AoiqError):
    """An event is inconsistent with the current system state."""


class NegativeElapsed(AoiqError):
    """A time increment was negative."""
