"""Exception types raised across the package."""


class FccStabError(Exception):
    """Base class for all package errors."""


class LatticeError(FccStabError, ValueError):
    """Malformed lattice or window description."""


class BoundsError(LatticeError, IndexError):
    """A site lies outside the window it was referred to."""


class ParityError(LatticeError):
    """A site has the wrong parity for the requested role."""


class ContextMismatchError(FccStabError, ValueError):
    """Two operators live on different lattices."""


class UndefinedGeneratorError(FccStabError):
    """The six-body generator at a window boundary has support outside the window."""


class ConfigError(FccStabError, ValueError):
    """Lattice dimensions violate a construction's preconditions."""


class MonopoleSectorError(FccStabError):
    """A syndrome with an odd number of excitations cannot be split into dipoles and quadrupoles."""


class PreconditionError(FccStabError, ValueError):
    """Generic violated precondition (odd membrane radius, degenerate string, ...)."""
