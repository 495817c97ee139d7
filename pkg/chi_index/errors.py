"""Exception hierarchy shared by every layer of chi_index."""


class ChiIndexError(Exception):
    """Base class for every error raised by the library."""


class PreconditionError(ChiIndexError, ValueError):
    """An input violates a documented precondition."""


class NotInSubgroupError(ChiIndexError):
    """A discrete-log target does not lie in the subgroup generated by the base."""


class NotTotallyRealError(PreconditionError):
    """The class of -1 is not in H, so the field is not totally real."""


class NonRationalTraceError(ChiIndexError):
    """A trace of a root of unity lies in Z_p but not in Z."""


class ZeroCyclotomicFactorError(ChiIndexError):
    """A factor 1 - zeta reduced to 0 mod ell. Unreachable for valid contexts."""


class ReportWriteError(ChiIndexError):
    """The report could not be written."""

    def __init__(self, path, reason):
        super().__init__(f"could not write report to {path}: {reason}")
        self.path = path


class UsageError(PreconditionError):
    """Command-line flags are missing, conflicting or malformed."""
