"""Exception types for the trainer package."""


class TrainerError(Exception):
    """Base class for trainer failures."""


class EmptySoup(TrainerError):
    """The triangle soup has no triangles (or only degenerate ones)."""


class FormatError(TrainerError):
    """A mesh or weight file could not be parsed."""


class NonFiniteLoss(TrainerError):
    """Training produced NaN or Inf; carries step diagnostics."""

    def __init__(self, step, terms):
        self.step = step
        self.terms = terms
        super().__init__(
            f"non-finite loss at step {step}: "
            + ", ".join(f"{k}={v}" for k, v in terms.items()))


class NoPointsInBand(TrainerError):
    """The evaluation band |s| < delta caught no grid points."""
