"""Exception types shared across the package.

Each class carries a ``kind`` tag so the CLI can map failures onto exit codes
without string matching.
"""


class HofaError(Exception):
    kind = "error"
    exit_code = 1


class InvalidArgument(HofaError, ValueError):
    kind = "invalid-argument"
    exit_code = 2


class OutOfRange(HofaError, IndexError):
    kind = "out-of-range"
    exit_code = 2


class EmptyDomainError(HofaError, ValueError):
    kind = "empty-domain"
    exit_code = 2


class InsufficientRange(HofaError, ValueError):
    kind = "insufficient-range"
    exit_code = 2


class ArithmeticOverflow(HofaError, OverflowError):
    kind = "arithmetic-overflow"
    exit_code = 1


class NotEligible(HofaError, ValueError):
    kind = "not-eligible"
    exit_code = 2


class SizeLimitError(HofaError, ValueError):
    kind = "size-limit"
    exit_code = 2


class VerificationError(HofaError, RuntimeError):
    """An exact identity check failed; ``witness`` holds the offending point."""

    kind = "internal-error"
    exit_code = 1

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
