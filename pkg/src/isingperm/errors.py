"""Exception types shared across the package.

The CLI maps these onto its exit-code contract, so new error conditions
should reuse one of the classes below rather than raising bare ValueError.
"""


class InvalidInputError(ValueError):
    """Malformed or out-of-contract input (bad matrix data, bad parameters)."""


class DimensionTooLargeError(InvalidInputError):
    """Requested dimension exceeds the hard cap of an exponential-cost routine."""


class DtOutOfRangeError(InvalidInputError):
    """Time step violates the finite-difference convergence bound."""
