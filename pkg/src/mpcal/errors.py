"""Exception types raised by the calibration library.

Every error derives from :class:`MpcalError`.  Errors raised while running a
multi-stage procedure carry the name of the failing stage in ``stage`` so
front ends can report where a pipeline aborted.
"""


class MpcalError(Exception):
    """Base class for all library errors."""

    stage: str | None = None


class GridMismatch(MpcalError):
    """Two networks with non-identical frequency grids were combined."""


class ReferenceImpedanceMismatch(MpcalError):
    """Two networks with different reference impedances were combined."""


class ZeroTransmission(MpcalError):
    """A two-port has S21 = 0 at some frequency; S->T conversion is undefined."""


class SingularT(MpcalError):
    """A T-matrix has T22 = 0 at some frequency; T->S conversion is undefined."""


class SingularReduction(MpcalError):
    """(I - Gamma*S_tt) is singular at some frequency during port reduction."""


class TouchstoneSyntaxError(MpcalError):
    """Malformed Touchstone content.  Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedParameter(MpcalError):
    """Touchstone file holds non-S network parameters (Y/Z/G/H)."""


class NonMonotonicFrequency(MpcalError):
    """Frequencies in a Touchstone file are not strictly increasing."""


class CountMismatch(MpcalError):
    """Number of values per frequency block does not match the port count."""


class ModelPole(MpcalError):
    """A reflection embed/correct denominator fell below threshold."""


class DegenerateStandards(MpcalError):
    """Calibration standards are electrically indistinct at some frequency."""


class ZeroTracking(MpcalError):
    """Recovered reflection-tracking product is (numerically) zero."""


class InsufficientSignal(MpcalError):
    """Transmission path attenuation exceeds the configured signal floor."""


class PhaseTrackingAmbiguous(MpcalError):
    """Root-sign tracking cannot be resolved on this frequency grid."""


class MissingPair(MpcalError):
    """A required pairwise measurement is absent."""

    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"missing pairwise measurement for ports ({i}, {j})")


class IncompleteDataset(MpcalError):
    """A measurement campaign is missing required entries."""


class FormatVersionMismatch(MpcalError):
    """Persisted data uses an unknown format version."""


class ChecksumMismatch(MpcalError):
    """A payload file does not match its recorded SHA-256."""


class ConfigInvalid(MpcalError):
    """A simulator configuration field is out of range.  Carries the field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class StandardSeparationWarning(UserWarning):
    """Calibration standards are distinct but closer than the warning threshold."""
