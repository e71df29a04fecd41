"""Exception types shared across the package.

The CLI maps these onto exit codes, so each failure mode gets its own class.
"""


class UmbilixError(Exception):
    """Base class for every error raised by umbilix."""


class InputError(UmbilixError):
    """Bad user input: malformed expression, surface file, or parameter."""


class ExprSyntaxError(InputError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class UnknownIdentifierError(InputError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class ParameterError(InputError):
    """Invalid gallery name or gallery parameter."""


class DomainError(UmbilixError):
    """Evaluation point outside the declared parameter domain."""


class NonFiniteError(UmbilixError):
    """An intermediate value is undefined (log of a non-positive number, 0/0, ...)."""


class RankDeficiencyError(UmbilixError):
    """The immersion (or metric) is degenerate at an evaluated point."""


class DegenerateLoopError(UmbilixError):
    """The sampled field (nearly) vanishes on the loop, so no index is defined."""


class NonConvergenceError(UmbilixError):
    def __init__(self, message, largest_step=None):
        self.largest_step = largest_step
        super().__init__(message)


class NonIsolatedUmbilicError(UmbilixError):
    """The umbilic locus contains a whole grid cell (e.g. a sphere patch)."""


class AdmissibilityError(UmbilixError):
    """A height direction fails 0 < <a, normal> < 1 on the evaluation locus."""


class PreconditionError(UmbilixError):
    """A documented precondition of an operation does not hold."""
