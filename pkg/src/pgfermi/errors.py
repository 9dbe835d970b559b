"""Exception hierarchy shared by every pgfermi module."""


class PGFermiError(Exception):
    """Base class for all pgfermi errors."""


class InputError(PGFermiError, ValueError):
    """Malformed or out-of-range input (CLI maps these to exit code 2)."""


class ShapeMismatch(InputError):
    pass


class DegreeOutOfRange(InputError):
    pass


class InvalidParams(InputError):
    pass


class WeightLengthMismatch(InputError):
    pass


class KindMismatch(InputError):
    pass


class ContextMismatch(InputError):
    pass


class NotUnitLeading(InputError):
    pass


class NoNullspace(PGFermiError):
    pass


class DegenerateNullspace(PGFermiError):
    pass


class Singular(PGFermiError):
    pass


class SingularBasis(Singular, InputError):
    pass


class DegenerateSpectrum(InputError):
    pass


class PairingSingular(PGFermiError):
    pass


class TerminationFailure(PGFermiError):
    pass


class BiorthogonalityFailure(PGFermiError):
    pass


class FactorizationFailure(PGFermiError):
    pass


class ReconstructionFailure(PGFermiError):
    pass
