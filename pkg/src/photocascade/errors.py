"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """Malformed or out-of-range input."""


class PhotonNumberMismatchError(InvalidArgumentError):
    """Input and output photon totals differ."""


class ResourceLimitError(RuntimeError):
    """Exhaustive enumeration would exceed the configured composition cap."""


class ZeroProbabilityError(ArithmeticError):
    """Conditioning on an outcome that has probability zero."""


class UnachievableTargetError(ValueError):
    """No efficiency in (0, 1] reaches the requested confidence."""
