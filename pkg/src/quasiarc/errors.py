"""Exception types, aligned with the CLI exit-code contract."""


class QuasiarcError(Exception):
    """Base class for package errors."""


class HypothesisFailure(QuasiarcError):
    """The input space violates a standing hypothesis (connectivity, seed
    separation, net coverage at the working resolution).  Signals a bad
    input, not a bug.  CLI exit code 1."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ScaleFloorError(QuasiarcError):
    """Requested scale is below the resolution floor.  CLI exit code 2."""


class FormatError(QuasiarcError):
    """Malformed or inconsistent input file.  CLI exit code 2."""


class VerificationError(QuasiarcError):
    """An internal guarantee failed its exhaustive check; carries a witness.
    Indicates a construction bug.  CLI exit code 3."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
