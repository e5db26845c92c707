"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); numeric
failures such as a singular correlation submatrix derive from
:class:`NumericalError` (an ``ArithmeticError``). The command line maps the
two families to exit codes 2 and 3.
"""


class FwdEntropyError(Exception):
    """Base class for all package errors."""


class InputError(FwdEntropyError, ValueError):
    """Malformed or inconsistent input."""


class NumericalError(FwdEntropyError, ArithmeticError):
    """A computation could not be carried out in floating point."""


class NotPositiveDefinite(NumericalError):
    """A correlation submatrix failed its Cholesky factorization."""

    def __init__(self, subset, names=None):
        self.subset = subset
        self.names = names
        members = list(subset)
        if names is not None:
            label = ", ".join(str(names[i]) for i in members)
        else:
            label = ", ".join(str(i) for i in members)
        super().__init__(f"correlation submatrix on {{{label}}} is not positive definite")


class OverlappingSets(InputError):
    pass


class MissingSubset(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UniverseTooLarge(InputError):
    pass


class NotASynergy(InputError):
    pass


class AlphaOutOfRange(InputError):
    pass


class DegenerateColumn(InputError):
    pass


class CyclicGraph(InputError):
    pass
