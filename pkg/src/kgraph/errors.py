"""Exception hierarchy.

Every error raised on purpose by the package derives from ``KGraphError``
(itself a ``ValueError``), so callers can catch the whole family at once.
"""


class KGraphError(ValueError):
    pass


# -- presentation / validation --------------------------------------------

class MalformedSkeleton(KGraphError):
    pass


class SourceViolation(KGraphError):
    """Some vertex receives no edge of some color (``Λ^{e_i}(v)`` empty)."""


class FactorizationError(KGraphError):
    pass


class InvalidVertex(KGraphError, KeyError):
    pass


# -- morphism algebra ------------------------------------------------------

class NotComposable(KGraphError):
    pass


class DegreeMismatch(KGraphError):
    pass


class DegreeOrderViolation(KGraphError):
    pass


class InfiniteVertexSet(KGraphError):
    pass


class WindowOverflow(KGraphError):
    """A rewrite needed a commuting square that lies outside a finite window."""


class SearchBudgetExceeded(KGraphError):
    def __init__(self, explored, budget):
        super().__init__(f"isomorphism search gave up after {explored} nodes (budget {budget})")
        self.explored = explored
        self.budget = budget


# -- constructions ---------------------------------------------------------

class NonFunctorialCocycle(KGraphError):
    pass


class NonFreeAction(KGraphError):
    pass


class IncompatibleAction(KGraphError):
    pass


class VertexSetMismatch(KGraphError):
    pass


class NonCommutingMatrices(KGraphError):
    pass


class InvalidTheta(KGraphError):
    pass


# -- algebra ---------------------------------------------------------------

class GraphMismatch(KGraphError):
    pass


class DegreeTooSmall(KGraphError):
    pass


class GradingHypothesisViolated(KGraphError):
    def __init__(self, msg, edge=None):
        super().__init__(msg)
        self.edge = edge


# -- file formats ----------------------------------------------------------

class ParseError(KGraphError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class FileSyntaxError(ParseError):
    pass


class UnknownName(ParseError):
    pass


class DuplicateDeclaration(ParseError):
    pass
