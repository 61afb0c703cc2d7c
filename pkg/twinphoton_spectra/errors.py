from typing import Iterable, List, Optional

import numpy as np


class TwinPhotonError(Exception):
    """Base class for every error raised by twinphoton_spectra."""


# --- validation -------------------------------------------------------------

class ValidationIssue(TwinPhotonError):
    """A single violated physical-consistency rule."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class InvalidEnergyOrdering(ValidationIssue):
    pass


class DipoleShapeMismatch(ValidationIssue):
    pass


class PumpEnergyMismatch(ValidationIssue):
    pass


class NegativeRate(ValidationIssue):
    pass


class NonPositiveDephasing(NegativeRate):
    pass


class DarkSystem(ValidationIssue):
    pass


class UnknownCoherenceElement(ValidationIssue):
    pass


class ValidationError(TwinPhotonError):
    """Aggregate of every issue found in one validation pass."""

    def __init__(self, issues: Iterable[ValidationIssue]):
        self.issues: List[ValidationIssue] = list(issues)
        lines = [f"{type(i).__name__}: {i}" for i in self.issues]
        super().__init__("; ".join(lines) or "invalid parameters")

    def kinds(self) -> set:
        return {type(i) for i in self.issues}


class ConfigError(TwinPhotonError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# --- numerics ---------------------------------------------------------------

class NumericalError(TwinPhotonError):
    pass


def is_numerical(exc: BaseException) -> bool:
    """Our numerical errors plus the ones numpy, scipy and float arithmetic raise."""
    return isinstance(exc, (NumericalError, np.linalg.LinAlgError, ArithmeticError))


class NegativeTime(NumericalError):
    pass


class UnknownCoherence(NumericalError):
    pass


class ZeroDephasing(NumericalError):
    pass


class DivergentKernel(NumericalError):
    pass


class DeltaNotSamplable(NumericalError):
    pass


class UnknownKind(NumericalError):
    pass


class UnsupportedModel(NumericalError):
    pass


class TruncationTooShort(NumericalError):
    pass


class LineOutsideGrid(NumericalError):
    pass


class CheckFailed(NumericalError):
    """A numerical self-check (e.g. correspondence) did not pass."""


# --- io ---------------------------------------------------------------------

class ExportError(TwinPhotonError):
    pass
