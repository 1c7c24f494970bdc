"""Exception hierarchy shared by every sketchlab module."""


class SketchLabError(Exception):
    """Base class for all library errors."""


class NumericalFailure(SketchLabError):
    """A LAPACK routine failed to converge."""


class ZeroMatrix(SketchLabError, ValueError):
    pass


class DimensionMismatch(SketchLabError, ValueError):
    pass


class DegenerateUpdate(SketchLabError):
    """The appended row lies (numerically) in the span of the existing rows."""


class SingularSurrogate(SketchLabError):
    pass


class SingularSystem(SketchLabError):
    pass


class InvalidProfile(SketchLabError, ValueError):
    pass


class KExceedsRank(SketchLabError, ValueError):
    """Sketch size is at least the rank, so the gamma equation has no finite root."""

    def __init__(self, k, rank):
        super().__init__(f"sketch size k={k} must be smaller than the rank ({rank})")
        self.k = k
        self.rank = rank


class ParseError(SketchLabError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
