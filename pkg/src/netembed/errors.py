"""Exception hierarchy shared across the package."""


class ValidationError(ValueError):
    """A caller-supplied value violates a precondition (bad dimension,
    malformed descriptor, parameter out of range)."""


class SamplingError(RuntimeError):
    """Rejection sampling exhausted its draw budget."""


class PlacementError(RuntimeError):
    """Edge placement could not find an admissible breakpoint within the
    retry cap.  Carries the failing edge and a tally of which condition
    rejected each attempt."""

    def __init__(self, edge, attempts, tally):
        self.edge = edge
        self.attempts = attempts
        self.tally = dict(tally)
        super().__init__(
            f"no admissible breakpoint for edge {edge} after {attempts} draws "
            f"(rejections: {self.tally})"
        )


class InternalConsistencyError(RuntimeError):
    """A bound the construction guarantees failed its re-check.  This is a
    bug indicator, not a user error."""
