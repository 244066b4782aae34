"""Exception hierarchy shared by all modules."""


class UrnSpreadError(Exception):
    """Base class for all package errors."""


class DataError(UrnSpreadError, ValueError):
    """Malformed or inconsistent input data."""


class GraphFormatError(DataError):
    pass


class DuplicateEdgeId(GraphFormatError):
    pass


class NotStronglyConnected(UrnSpreadError):
    pass


class InvalidTrace(DataError):
    pass


class EmptyCounts(DataError):
    pass


class InconsistentCounts(DataError):
    pass


class NotConverged(UrnSpreadError):
    """Power iteration did not settle within its iteration budget."""


class NoPerronVector(NotConverged):
    """The urn matrix has no usable Perron eigenvector (reducible support or no convergence)."""


class LPSizeError(UrnSpreadError):
    pass


class RankDeficient(DataError):
    pass
