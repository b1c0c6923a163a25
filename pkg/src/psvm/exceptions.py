"""Exception hierarchy.

Data problems derive from :class:`DataError`, numerical failures from
:class:`NumericError`; the CLI maps them to exit codes 3 and 4.
"""


class PSVMError(Exception):
    """Base class for all errors raised by this package."""


class DataError(PSVMError, ValueError):
    pass


class NumericError(PSVMError, ArithmeticError):
    pass


class DegenerateColumn(DataError):
    """A predictor column has zero sample standard deviation."""


class EmptySide(DataError):
    """A dividing point leaves one side of the response empty."""


class EmptySlice(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class FileFormat(DataError):
    pass


class UnknownLabel(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class BadSpec(DataError):
    pass


class ConstantInput(DataError):
    pass


class InfeasibleLabels(DataError):
    """All labels of a dual problem share one sign."""


class DegenerateSplit(DataError):
    pass


class ZeroSpread(DataError):
    pass


class NotPSD(NumericError):
    pass


class SingularCovariance(NumericError):
    pass


class MaxIterExceeded(NumericError):
    pass


class NoSupportVectors(NumericError):
    pass


class RankDeficientBasis(NumericError):
    pass


class RankDeficient(NumericError):
    pass


class ConvergenceWarning(UserWarning):
    pass


class RankDeficientWarning(UserWarning):
    pass


class SingularDesignWarning(UserWarning):
    pass
