"""Exception types shared across the pipeline."""


class K3CertError(Exception):
    """Base class for all pipeline errors."""


class RangeError(K3CertError):
    """An exponent left the configured range [emin, emax]. Fatal."""


class DomainError(K3CertError):
    """Operation applied outside its domain (division by a ball containing
    zero, square root of a ball reaching <= 0, discriminant reaching <= 0)."""


class SingularError(K3CertError):
    """A pivot ball contains zero, or an inverse could not be verified."""


class IntegralityError(K3CertError):
    """An exact rational computation produced a non-integer where an
    integer matrix was expected (signals a transcription error)."""


class FactorError(K3CertError):
    """Exact polynomial division left a nonzero remainder."""


class PositivityError(K3CertError):
    """A quantity that must be certified positive could not be."""


class PreconditionError(K3CertError):
    """A documented precondition of an operation failed."""


class CertificationFailure(K3CertError):
    """A shadowing hypothesis failed; carries the name of the first one."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"hypothesis {hypothesis} failed" + (f": {detail}" if detail else ""))


class BudgetError(K3CertError):
    """A subdivision or iteration budget was exhausted."""


class PoleError(K3CertError):
    """Stereographic projection attempted at (or too close to) the pole."""


class DegeneracyError(K3CertError):
    """Arc geometry could not be put in general position."""


class SubdivisionBudgetError(BudgetError):
    """Arc tracking exceeded its refinement budget."""


class ExtractionError(K3CertError):
    """Half-twist word extraction failed to trivialize its arc."""


class StageError(K3CertError):
    """A stage of the word algorithm failed its contract."""

    def __init__(self, stage: int, detail: str = ""):
        self.stage = stage
        super().__init__(f"stage {stage} failed" + (f": {detail}" if detail else ""))
