"""Exception hierarchy shared by every module.

Every error carries its class name to the CLI, so names are part of the
public surface.
"""


class QfoldError(Exception):
    """Base class for all input and computation errors."""


# algebra
class TableNotSymmetric(QfoldError):
    pass


class UnitRowMissing(QfoldError):
    pass


class EnclosureInconsistent(QfoldError):
    pass


class ContextMismatch(QfoldError):
    pass


class NotInvertible(QfoldError):
    pass


class Undecidable(QfoldError):
    pass


# characters
class DomainMismatch(QfoldError):
    pass


class ShapeMismatch(QfoldError):
    pass


# root data
class UnsupportedType(QfoldError):
    pass


class NotWeylSymmetric(QfoldError):
    pass


class ReconstructionMismatch(QfoldError):
    """Internal consistency failure; indicates a bug rather than bad input."""


# polytopes and quasifolds
class Unbounded(QfoldError):
    pass


class NotSimple(QfoldError):
    pass


class Empty(QfoldError):
    pass


class PiNotSurjective(QfoldError):
    pass


class OutsidePolytope(QfoldError):
    pass


class EmptySlice(QfoldError):
    pass


class NotTransverse(QfoldError):
    pass


# localization
class NotDelzant(QfoldError):
    pass


class NonIntegralVertex(QfoldError):
    pass


class IrrationalInput(QfoldError):
    pass


class NonGenericBeta(QfoldError):
    pass


class SupportSpill(QfoldError):
    """A localized count was nonzero outside the polytope's bounding box."""


# cli
class ParseError(QfoldError):
    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
