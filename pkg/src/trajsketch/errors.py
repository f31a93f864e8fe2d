"""Exception types shared across the package.

Every error raised by library code derives from TrajSketchError so callers
can catch one base type at API boundaries (the HTTP layer maps subsets of
these onto structured error codes).
"""


class TrajSketchError(Exception):
    """Base class for all trajsketch errors."""


class BehindCamera(TrajSketchError):
    """A 3D point sits on or behind the camera plane (Z <= 0)."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"point {index} is behind the camera")


class InvalidIndex(TrajSketchError):
    """A step/sample index is out of range for the episode."""


class InvalidRange(TrajSketchError):
    """A numeric range is degenerate or inverted (e.g. h_min >= h_max)."""


class EmptyResult(TrajSketchError):
    """An operation produced no usable output (e.g. every point dropped)."""


class EpisodeTooShort(TrajSketchError):
    """Interaction detection needs at least two samples."""


class EmptySpec(TrajSketchError):
    """A sketch spec has no path vertices to draw."""


class EmptySequence(TrajSketchError):
    """A waypoint sequence has zero points."""


class TooLarge(TrajSketchError):
    """Input exceeds a hard size guard (oracle recursion, request caps)."""


class SchemaError(TrajSketchError):
    """An episode log line does not match the expected schema."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class NonMonotonicSteps(TrajSketchError):
    """Episode step indices are not strictly increasing."""


class TooFewSamples(TrajSketchError):
    """A stroke needs at least two samples to define a path."""


class MissingDepth(TrajSketchError):
    """A hand-demo frame lacks depth for a required landmark."""


class BadLandmarkIndex(TrajSketchError):
    """A configured hand landmark index is outside the 21-point layout."""


class Unreachable(TrajSketchError):
    """An IK target lies outside the arm's reachable workspace."""


class LimitViolation(TrajSketchError):
    """A joint configuration violates the chain's joint limits."""
