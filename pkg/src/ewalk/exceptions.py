"""Exception types raised by the walk toolkit."""


class EwalkError(Exception):
    """Base class for all toolkit errors."""


class IncompatibleRing(EwalkError, ValueError):
    """A ring size does not match the spatial period of a field or block layout."""


class NotTranslationInvariant(EwalkError, ValueError):
    """A Fourier symbol was requested for a position-dependent walk."""


class NotNormalized(EwalkError, ValueError):
    """A Verblunsky pair does not lie on the unit 3-sphere."""


class NotRepresentable(EwalkError, ValueError):
    """A walk cannot be written through the CMV correspondence."""
