"""Exception hierarchy shared by every bitcov module."""


class BitcovError(Exception):
    """Base class for all library errors."""


class NotPSD(BitcovError):
    pass


class NonFinite(BitcovError, ValueError):
    pass


class ZeroMatrix(BitcovError, ValueError):
    pass


class NoConvergence(BitcovError, ArithmeticError):
    pass


class EmptyBatch(BitcovError, ValueError):
    pass


class DegenerateColumn(BitcovError, ValueError):
    """A zero dither scale was paired with a column holding nonzero data."""


class BadLength(BitcovError, ValueError):
    pass


class FormatError(BitcovError, ValueError):
    """Malformed Q2BC stream (bad magic, version, or truncated payload)."""


class InsufficientGrid(BitcovError, ValueError):
    pass


class SpecError(BitcovError, ValueError):
    """Invalid estimator or experiment configuration."""


class Empty(BitcovError, ValueError):
    """An aggregation or selection was asked of no data."""
