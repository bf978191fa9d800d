"""Exception hierarchy.

Errors deriving from :class:`PreconditionError` describe bad input (malformed
files, mismatched meshes, invalid parameters). The CLI maps them to exit code 2;
anything else is a runtime failure (exit code 1).
"""


class MeshError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(MeshError, ValueError):
    """The caller handed us something that violates an operation's contract."""


class IndexOutOfRange(PreconditionError):
    pass


class DegenerateFace(PreconditionError):
    pass


class EmptyMesh(PreconditionError):
    pass


class IsolatedVertex(PreconditionError):
    pass


class GeometricallyDegenerateFace(PreconditionError):
    pass


class LengthMismatch(PreconditionError):
    pass


class FaceCountMismatch(PreconditionError):
    pass


class VertexCountMismatch(PreconditionError):
    pass


class OpenMesh(PreconditionError):
    pass


class TooFewNeighbors(PreconditionError):
    pass


class ParseError(PreconditionError):
    def __init__(self, reason, line=None):
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")


class UnsupportedFormat(PreconditionError):
    pass


class IoError(PreconditionError, OSError):
    pass


class NoCandidate(MeshError, RuntimeError):
    """Every half-window energy reached the sentinel; the mesh scale is unusable."""
