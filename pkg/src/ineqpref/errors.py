"""Exception types shared across the package."""


class IneqprefError(Exception):
    """Base class for domain errors."""


# -- distributions and welfare ------------------------------------------------

class NonPositiveIncome(IneqprefError):
    """An income must be strictly positive for the requested evaluation."""


class NonPositiveMean(IneqprefError):
    """Relative index undefined for non-positive mean income."""


class LengthMismatch(IneqprefError):
    """Two distributions must have the same number of individuals."""


class MeanMismatch(IneqprefError):
    """Operation requires equal mean incomes."""


class GridArityMismatch(IneqprefError):
    """Grid weighting function sampled at abscissae incompatible with n."""


# -- transfers ----------------------------------------------------------------

class RankReversal(IneqprefError):
    """Applying the transfer would break the non-decreasing income order."""


class NegativeIncome(IneqprefError):
    """Applying the transfer would drive an income below zero."""


class UnsupportedArity(IneqprefError):
    """Unit-transfer enumeration is defined for five individuals only."""


class TiedIncomes(IneqprefError):
    """Classification requires a strictly increasing base distribution."""


# -- survey sessions ----------------------------------------------------------

class SessionComplete(IneqprefError):
    """The session already reached its final phase."""


class OutOfOrder(IneqprefError):
    """Action does not match the session cursor or phase."""


class ReviewWindowClosed(IneqprefError):
    """Revision attempted outside the block's review window."""


class PhaseIncomplete(IneqprefError):
    """Requested value is undefined before the relevant phase completes."""


# -- analysis -----------------------------------------------------------------

class EmptyStratum(IneqprefError):
    """A stratum contains no observations (reported, not fatal)."""


class DegenerateTable(IneqprefError):
    """Contingency table has a zero margin."""


# -- estimation ---------------------------------------------------------------

class InvalidThresholds(IneqprefError):
    """Ordered-probit thresholds must satisfy tau1 <= 0 <= tau2."""


class ConstraintViolation(IneqprefError):
    """Parameter vector violates the model's feasibility constraints."""


class NotParametric(IneqprefError):
    """Shape classification applies to one-parameter models only."""


class DataMismatch(IneqprefError):
    """Model comparison requires fits on identical data."""


class ZeroBandwidth(IneqprefError):
    """Kernel density undefined when all values coincide (point mass)."""
