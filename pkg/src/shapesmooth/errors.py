"""Exception types raised by the shapesmooth library.

Math-level failures carry a witness (a point where a required property
fails) whenever one is available, so that callers can report actionable
diagnostics instead of bare assertion errors.
"""


class ShapeSmoothError(Exception):
    """Base class for all library errors."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def diagnostic(self):
        """Machine-readable payload for CLI error reporting."""
        out = {"error": type(self).__name__, "message": str(self)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


class InvalidN(ShapeSmoothError):
    """Partition size out of range."""


class InvalidP(ShapeSmoothError):
    """Nonpositive integrability exponent."""


class InvalidT(ShapeSmoothError):
    """Nonpositive modulus step bound."""


class DomainMismatch(ShapeSmoothError):
    """Two partitions do not share the same domain."""


class NotARemesh(ShapeSmoothError):
    """The fine partition fails the remesh criterion for the coarse one."""


class BadKnotCount(ShapeSmoothError):
    """A gluing primitive received the wrong number of knots."""


class NotNonnegative(ShapeSmoothError):
    """An input that must be nonnegative was certified negative somewhere."""


class NotMonotone(ShapeSmoothError):
    """Input is not non-decreasing."""


class NotConvex(ShapeSmoothError):
    """Input is not convex."""


class NotInShapeClass(ShapeSmoothError):
    """Input fails the requested q-monotonicity certificate."""


class InsufficientSmoothness(ShapeSmoothError):
    """Input lacks the continuity degree the operation requires."""


class MeshTooCoarse(ShapeSmoothError):
    """Mesh violates the proven fineness bound (theoretical mode only)."""


class ShapeCertificationFailed(ShapeSmoothError):
    """Adaptive smoothing exhausted its retry budget without a certificate."""


class GlueFailed(ShapeSmoothError):
    """No candidate in the gluing search could be certified; indicates a bug."""


class ShapeViolated(ShapeSmoothError):
    """Sampled data is not q-monotone, so the interpolant cannot be."""
