"""Exception types shared across the engine."""


class DestabError(Exception):
    """Base class for all engine errors."""


class ValidationError(DestabError):
    pass


class ParseError(DestabError):
    pass


class UnknownName(DestabError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown name"


class TruncationInsufficient(DestabError):
    """A requested degree lies beyond what the truncated input determines."""


class CompositeNonzero(DestabError):
    pass


class NotUnstable(DestabError):
    pass


class RouteMismatch(DestabError):
    """Two independent computations of the same object disagreed."""


class NotACycle(DestabError):
    pass


class DiamondViolation(DestabError):
    pass


class PageMismatch(DestabError):
    pass


class UnsupportedModule(DestabError, ValueError):
    """Input outside the range a driver handles."""
