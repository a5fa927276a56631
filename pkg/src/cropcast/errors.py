"""Exception hierarchy shared by every cropcast module."""


class CropcastError(Exception):
    """Base class for all library errors."""


class ParseError(CropcastError):
    """A file row could not be parsed; the message names the line number."""


class DuplicateKeyError(CropcastError):
    """Two rows claim the same (date, market, crop) slot."""


class ValidationError(CropcastError):
    """A value or structure violates a documented invariant."""


class AlignmentError(CropcastError):
    """Two series share no trading days or disagree on identity."""


class InsufficientDataError(CropcastError):
    """An operation needs more observations than the input provides."""


class NumericalError(CropcastError):
    """A regression or factorization is singular or otherwise degenerate."""


class ShapeError(CropcastError):
    """Array dimensions do not match the operation's contract."""


class DomainError(CropcastError):
    """An input value lies outside the mathematical domain of the operation."""


class VersionError(CropcastError):
    """A catalog insert does not advance the version counter."""


class EmptyCatalogError(CropcastError):
    """A retrieval was attempted on a catalog with no entries."""


class ConfigError(CropcastError):
    """A run configuration failed validation."""


class UnevaluableForecastError(CropcastError):
    """No ground-truth position is available to score a forecast."""
