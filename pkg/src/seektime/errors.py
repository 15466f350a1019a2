"""Exception hierarchy shared across the package.

The four bases map one-to-one onto the CLI exit codes: bad input (1),
structural problems with the chain (2), internal-consistency failures of
quantities that are theorems (3), and simulation timeouts (4).
"""


class SeektimeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SeektimeError):
    """Unusable input: syntax, shape, values or unknown state names."""

    exit_code = 1


class ParseError(InputError):
    """Malformed matrix text. Carries 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ShapeError(InputError):
    """Matrix is not square, or a row has the wrong length."""


class StochasticityError(InputError):
    """A row does not sum to 1 within tolerance."""


class NonnegativityError(InputError):
    """A transition probability is negative (or not finite)."""


class UnknownStateError(InputError):
    """A state was named by a label or index that does not exist."""


class StructureError(SeektimeError):
    """The chain is reducible (or numerically indistinguishable from it)."""

    exit_code = 2


class ConditioningError(StructureError):
    """A solver produced garbage; the chain is effectively reducible."""


class MultiplicityError(StructureError):
    """A second eigenvalue sits on top of 1; the chain is effectively reducible."""


class ConsistencyError(SeektimeError):
    """A computed quantity violates an identity that holds exactly in theory.

    This always signals a bug or severe ill-conditioning, never a property
    of the input chain.
    """

    exit_code = 3


class SimulationTimeout(SeektimeError):
    """A simulation replica exceeded the per-replica step cap."""

    exit_code = 4

    def __init__(self, message, replica=None):
        super().__init__(message)
        self.replica = replica
