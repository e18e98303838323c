"""Exception hierarchy. Every error raised deliberately by the package derives
from :class:`HSchwarzError` so callers (and the CLI) can catch one type."""


class HSchwarzError(Exception):
    pass


class NonFiniteJet(HSchwarzError, ValueError):
    pass


class DivisionByZeroJet(HSchwarzError, ZeroDivisionError):
    """Jet division by a jet whose value is below the configured floor."""


class CriticalPoint(HSchwarzError, ValueError):
    """A derivative that must be non-zero (f', h') vanished at the point."""


class PointOutsideDisk(HSchwarzError, ValueError):
    pass


class StencilOutsideDomain(HSchwarzError, ValueError):
    pass


class PoleHit(HSchwarzError, ZeroDivisionError):
    pass


class InvalidExpression(HSchwarzError, ValueError):
    """An expression is not finite/analytic on the sample grid."""


class NotEquivalent(HSchwarzError):
    pass


class DegenerateJacobian(HSchwarzError, ValueError):
    pass


class RangeViolation(HSchwarzError, ValueError):
    pass


class NotFactorable(HSchwarzError):
    pass


class DegenerateBasePoint(HSchwarzError, ValueError):
    pass


class NotNormalized(HSchwarzError, ValueError):
    pass


class ConstantDilatation(HSchwarzError, ValueError):
    pass


class DocumentError(HSchwarzError, ValueError):
    """Malformed map document; ``path`` locates the offending field."""

    def __init__(self, message, path="", line=None):
        self.message = message
        self.path = path
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        prefix = ": ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
