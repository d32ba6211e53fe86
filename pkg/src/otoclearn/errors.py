"""Exception types shared across the package."""


class OtoclearnError(Exception):
    """Base class for package errors."""


class ResourceLimitError(OtoclearnError):
    """A requested computation exceeds a configured resource cap."""


class NumericalFailure(OtoclearnError):
    """A numerical routine produced NaNs, failed to converge, or broke an
    internal consistency check."""


class DataFormatError(OtoclearnError):
    """A persisted file could not be parsed; the message names the line."""


class IntegrityError(OtoclearnError):
    """A file and its metadata sidecar disagree, or the sidecar is missing."""


class GenerationError(OtoclearnError):
    """One or more samples failed during dataset generation.

    Collected per-sample failures are re-raised at the end of the run so the
    surviving rows are not silently dropped.
    """

    def __init__(self, failures):
        self.failures = list(failures)  # (sample index, exception) pairs
        indices = [i for i, _ in self.failures]
        first = self.failures[0][1] if self.failures else None
        super().__init__(
            f"{len(self.failures)} sample(s) failed at indices {indices}; "
            f"first error: {first!r}"
        )
