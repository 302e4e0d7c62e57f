"""Exception hierarchy shared by all modules."""


class BargmannError(Exception):
    """Base class for errors raised by this package."""


class InputError(BargmannError, ValueError):
    """Invalid arguments: bad indices, non-normalized states, wrong shapes."""


class CircuitMismatchError(InputError):
    """A circuit does not fit the registers or dimension it is applied to."""


class ResourceBudgetError(BargmannError):
    """A requested enumeration exceeds the configured budget."""

    def __init__(self, message, count):
        super().__init__(message)
        self.count = count


class DocumentError(BargmannError):
    """A JSON document or circuit text is malformed; ``path`` names the offending field or line."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
