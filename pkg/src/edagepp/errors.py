"""Exception types shared across the package."""


class EdagePPError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInput(EdagePPError):
    """Geometric input too degenerate to process (collinear, empty, zero-length)."""


class SingularFit(EdagePPError):
    """Polynomial least-squares system was numerically singular after retries."""


class GenerationFailed(EdagePPError):
    """Path or record generation did not succeed within the retry budget."""


class InvalidClearance(EdagePPError):
    """Clearance value must be strictly positive."""


class OutOfRaster(EdagePPError):
    """Geometry maps outside the raster; caller should re-pose."""


class DegenerateSubspace(EdagePPError):
    """Subspace anchors coincide; no frame can be derived."""


class PlacementStalled(EdagePPError):
    """Too many consecutive rejections while placing constraint obstacles."""


class TimesExceeded(EdagePPError):
    """Random pose search exhausted its try budget."""


class DeadEnd(EdagePPError):
    """Waypoint extraction ran out of non-zero unvisited neighbors."""


class StepLimit(EdagePPError):
    """Waypoint extraction exceeded its step budget."""


class IoFailure(EdagePPError):
    """Dataset file could not be written or read."""


class CorruptRecord(EdagePPError):
    """Stored record violates an invariant; the message names the check."""
