from __future__ import annotations


class CensusError(Exception):
    """Base class for all errors raised by chaos_census."""


class NotDoubleCovering(CensusError, ValueError):
    pass


class NotEvenCovering(CensusError, ValueError):
    pass


class SizeLimitExceeded(CensusError):
    """A computation would exceed a configured work or size limit."""


class ParityViolation(CensusError, ValueError):
    pass


class Unextendable(CensusError):
    """Growing a component would make it isomorphic to another component."""


class OddExponent(CensusError, ValueError):
    pass


class MissingMuCell(CensusError, KeyError):
    pass
