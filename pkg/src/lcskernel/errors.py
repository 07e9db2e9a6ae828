"""Exception and warning types raised across the package."""


class LCSKernelError(Exception):
    """Base class for all errors raised by :mod:`lcskernel`."""


# --- dataset ingestion -----------------------------------------------------

class DatasetError(LCSKernelError):
    """Problem reading a benchmark dataset from disk."""


class MissingFile(DatasetError, FileNotFoundError):
    pass


class MalformedLine(DatasetError, ValueError):
    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class InconsistentEdgeLabels(DatasetError, ValueError):
    pass


class InvalidGraph(LCSKernelError, ValueError):
    """A :class:`~lcskernel.graph.Graph` violates one of its invariants."""


# --- representation --------------------------------------------------------

class MissingEdgeLabel(LCSKernelError, KeyError):
    pass


class EmptySequence(LCSKernelError, ValueError):
    pass


class EmptyRepresentation(LCSKernelError, ValueError):
    pass


# --- transport / kernel ----------------------------------------------------

class EmptyMeasure(LCSKernelError, ValueError):
    pass


class BadMarginals(LCSKernelError, ValueError):
    pass


class TooLarge(LCSKernelError, ValueError):
    pass


class NonConvergenceWarning(RuntimeWarning):
    """Sinkhorn stopped at ``max_iter`` with a marginal violation above ``100 * tol``."""


# --- evaluation ------------------------------------------------------------

class SingleClass(LCSKernelError, ValueError):
    pass


class TooFewPerClassWarning(UserWarning):
    """Some class has fewer members than folds; splitting falls back to plain K-fold."""


class ConfigError(LCSKernelError, ValueError):
    pass
