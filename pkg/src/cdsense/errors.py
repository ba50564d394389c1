"""Exceptions raised by :mod:`cdsense`."""


class CDSenseError(Exception):
    """Base class for package errors."""


class NonPhysicalStateError(CDSenseError, ValueError):
    pass


class NonzeroDisplacementError(CDSenseError, ValueError):
    pass


class StepTooLargeError(CDSenseError, ArithmeticError):
    """Finite-difference QFIM did not converge between steps ``h`` and ``h/2``."""


class CutoffTooSmallError(CDSenseError, ValueError):
    """Truncated photon-number series leaves more tail mass than allowed."""


class TailTooLargeError(CDSenseError, ValueError):
    pass


class DegenerateLikelihoodError(CDSenseError, ValueError):
    """Every recorded outcome is vacuum, so the likelihood has no interior maximum."""
