"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`EqkError`,
which itself is a ``ValueError`` so that callers treating bad input generically
keep working.
"""


class EqkError(ValueError):
    pass


class InvalidDistribution(EqkError):
    """Atoms or weights do not describe a probability distribution."""


class BadWeights(EqkError):
    pass


class ZeroMass(EqkError):
    """A biasing or normalizing moment is zero."""


class AllMassAtZero(EqkError):
    pass


class SupportAtZero(EqkError):
    """The operation needs support contained in the positive integers."""


class NotDominated(EqkError):
    pass


class BadSchedule(EqkError):
    pass


class BudgetExceeded(EqkError):
    pass


class HypothesisFailed(EqkError):
    """The input does not satisfy the hypothesis of the result being checked."""


class DomainError(EqkError):
    """A bound was evaluated outside the region where it is proven."""


class BadParams(EqkError):
    pass


class BadConfig(EqkError):
    pass
