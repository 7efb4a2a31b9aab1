"""Exception hierarchy shared by every module."""


class SymDiffError(Exception):
    pass


class NotAUnit(SymDiffError, ZeroDivisionError):
    """A series expected to be invertible vanishes at the origin."""


class BlaschkeFlat(NotAUnit):
    """The Blaschke curvature (equivalently A - B) vanishes at the base point."""


class OrderExceedsValid(SymDiffError, ValueError):
    pass


class NonzeroConstantTerm(SymDiffError, ValueError):
    pass


class SingularJacobian(SymDiffError, ValueError):
    pass


class Degenerate(SymDiffError, ValueError):
    """The cubic has a repeated tangent line at the base point."""


class ZeroCubic(Degenerate):
    pass


class DegenerateForm(SymDiffError, ValueError):
    pass


class ShapeViolation(SymDiffError, RuntimeError):
    pass


class NotAdapted(SymDiffError, ValueError):
    pass


class GenerationFailed(SymDiffError, RuntimeError):
    pass


class InternalInconsistency(SymDiffError, RuntimeError):
    pass


class ParseError(SymDiffError, ValueError):
    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        self.position = position
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")
