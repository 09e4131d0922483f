"""Exception types raised by nacalc."""


class NacalcError(Exception):
    """Base class; ``code`` is the diagnostic code the CLI prints."""

    code = "E100"


class UnsupportedField(NacalcError):
    code = "E110"


class ResourceCapExceeded(NacalcError):
    code = "E103"


class LevelMismatch(NacalcError):
    code = "E111"


class OutsideDomain(NacalcError):
    code = "E112"


class InsufficientPrecision(NacalcError):
    code = "E113"


class IndeterminateOrder(NacalcError):
    """Two distinct exponents agree to the comparison threshold."""

    code = "E120"


class IndeterminateValuation(NacalcError):
    """The s-adic size of a value cannot be certified."""

    code = "E121"


class NotInvertible(NacalcError):
    code = "E122"


class DivergentSeries(NacalcError):
    code = "E130"


class GammaUnrepresentable(NacalcError):
    code = "E131"


class TailNotClosedForm(NacalcError):
    code = "E132"


class InvalidSpec(NacalcError):
    code = "E140"


class NonDiagonalB(NacalcError):
    code = "E141"


class ParameterMismatch(NacalcError):
    code = "E142"


class InvalidSymbol(NacalcError):
    code = "E150"


class EllipticityWarning(UserWarning):
    """Strict ellipticity was checked by sampling only."""
