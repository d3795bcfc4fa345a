"""Exception hierarchy.

The CLI maps each family to an exit code: input problems exit 1, numerical
failures exit 2, and violated internal identities (bug certificates) exit 3.
"""


class SlopelabError(Exception):
    exit_code = 1


class InputError(SlopelabError, ValueError):
    exit_code = 1


class DisconnectedGraph(InputError):
    pass


class NonPositiveLength(InputError):
    pass


class EmptyVertexSet(InputError):
    pass


class GenusTooSmall(InputError):
    pass


class NotStable(InputError):
    pass


class NotPolarized(InputError):
    pass


class HasBridge(InputError):
    pass


class MassNotOne(InputError):
    pass


class TreeGraph(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class NumericalError(SlopelabError, ArithmeticError):
    exit_code = 2


class NonConvergent(NumericalError):
    pass


class VolumeMismatch(NumericalError):
    pass


class IdentityViolation(SlopelabError, AssertionError):
    exit_code = 3


class NonConstantDiagonal(IdentityViolation):
    pass


class AdmissibilityCheckFailed(IdentityViolation):
    pass
