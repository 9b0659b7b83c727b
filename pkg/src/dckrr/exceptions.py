"""Exception types shared across the package."""

import numpy as np


class InputError(ValueError):
    """Invalid arguments or data (bad shapes, out-of-domain points, bad config)."""


class UnsupportedError(InputError):
    """Requested combination of options is not supported."""


class DivergentTraceError(InputError):
    """The eigenvalue profile has an infinite trace."""


class SingularMatrixError(np.linalg.LinAlgError):
    """Cholesky failed even at the largest jitter level.

    Attributes
    ----------
    jitter : float
        Relative jitter level of the last attempt.
    """

    def __init__(self, message, jitter):
        super().__init__(message)
        self.jitter = jitter


class PartitionFitError(RuntimeError):
    """A local fit inside the divide-and-conquer estimator failed."""

    def __init__(self, part, cause):
        super().__init__(f"local fit on part {part} failed: {cause}")
        self.part = part
        self.cause = cause
