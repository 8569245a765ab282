"""Exception types shared across the toolkit."""


class MincoverError(Exception):
    """Base class for all toolkit errors."""


class DataError(MincoverError, ValueError):
    """Invalid inputs: dimension mismatches, empty sets, bad specifications."""


class DatasetParseError(MincoverError):
    """A dataset file could not be parsed; carries the offending line number."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


class InfeasibleError(MincoverError):
    """The requested budget cannot yield a valid cover (e.g. k below class count)."""


class CoverInvalidError(MincoverError):
    """A cover solution fails verification against its dataset."""


class NodeLimitError(MincoverError):
    """Branch-and-bound node budget exhausted; carries the best cover found so far."""

    def __init__(self, message, incumbent):
        super().__init__(message)
        self.incumbent = incumbent


class DivergenceError(MincoverError):
    """Training loss became non-finite; carries the epoch where it happened."""

    def __init__(self, epoch):
        super().__init__(f"training diverged at epoch {epoch}: loss is not finite")
        self.epoch = epoch
