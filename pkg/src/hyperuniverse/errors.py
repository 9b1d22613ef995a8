"""Exception hierarchy shared by all stages.

The CLI maps each class onto a distinct exit code, so library code raises the
most specific one that applies.
"""


class HyperUniverseError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(HyperUniverseError, ValueError):
    """A precondition on the inputs does not hold."""


class FormatError(HyperUniverseError, ValueError):
    """A serialized artifact is malformed or has an unsupported version."""


class CertificationError(HyperUniverseError):
    """No generated graph met the requested spectral bound.

    ``best_lambda`` is the smallest second eigenvalue seen over all attempts.
    """

    def __init__(self, message, best_lambda):
        super().__init__(message)
        self.best_lambda = best_lambda


class RetryExhaustedError(HyperUniverseError):
    """Resampling did not produce an acceptable walk within the budget."""

    def __init__(self, message, worst_load=None):
        super().__init__(message)
        self.worst_load = worst_load


class InternalConsistencyError(HyperUniverseError, RuntimeError):
    """An algorithm reached a state its correctness argument rules out."""


class DecodeError(HyperUniverseError, ValueError):
    """A DFS code does not describe a valid traversal of the tree."""
