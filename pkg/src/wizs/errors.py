"""Exception hierarchy.

Three broad categories map onto the CLI exit codes: ValidationError (bad inputs,
exit 2), ComputationError (numerical degeneracies, exit 3), ProviderError (remote
provider failures, exit 4). Everything derives from WizsError so callers can catch
library failures in one clause.
"""


class WizsError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WizsError):
    """Inputs violate a precondition (shape, emptiness, domain, file format)."""


class ComputationError(WizsError):
    """Inputs were well-formed but the computation is degenerate or failed."""


class ProviderError(WizsError):
    """A remote provider misbehaved (unreachable, wrong shape, partial output)."""


# -- vector primitives ---------------------------------------------------------

class ZeroVectorError(ValidationError):
    """Vector norm at or below the zero threshold where a direction is required."""


class NonFiniteError(ValidationError):
    """NaN or infinity where finite values are required."""


class DimensionMismatchError(ValidationError):
    """Vectors that must share a dimension do not."""


class EmptySetError(ValidationError):
    """An operation over a collection received no elements."""


class DegenerateMeanError(ComputationError):
    """Mean of unit vectors cancelled to (numerically) zero."""


# -- scoring -------------------------------------------------------------------

class NoAlternativesError(ValidationError):
    """Scoring needs at least one contrast class besides the target."""


class DegenerateDifferenceError(ComputationError):
    """A difference vector used as a direction has (numerically) zero norm."""


class DegenerateSilhouetteError(ComputationError):
    """max(a, b) is (numerically) zero for some sample, so the ratio is undefined."""


# -- evaluation ----------------------------------------------------------------

class LengthMismatchError(ValidationError):
    """Paired sequences have different lengths."""


class DegenerateRanksError(ComputationError):
    """A rank vector is constant, so rank correlation is undefined."""


class EmptyClassError(ValidationError):
    """A class is missing the per-class samples the operation requires."""


# -- calibration ---------------------------------------------------------------

class InsufficientDataError(ValidationError):
    """Too few calibration points to fit."""


class InsufficientGroupsError(ValidationError):
    """Cross-validation needs at least three dataset groups."""


class SingularFitError(ComputationError):
    """The likelihood or its gradient became non-finite during fitting."""


class UnconvergedModelError(ComputationError):
    """A model whose fit did not converge was asked for a prediction."""


# -- data io -------------------------------------------------------------------

class CorruptBlobError(ValidationError):
    """Embedding blob fails a structural check; message names the byte offset."""


class MissingBlobError(ValidationError):
    """A referenced embedding blob file does not exist."""


class ManifestError(ValidationError):
    """Bundle manifest is structurally invalid; message names class and field."""


# -- providers -----------------------------------------------------------------

class ProviderUnavailableError(ProviderError):
    """Provider unreachable or persistently failing after retries."""


class ProviderShapeError(ProviderError):
    """Provider response violates the wire contract (counts, dims, types)."""


class PartialResultError(ProviderError):
    """Provider produced only part of the requested output.

    The usable portion is attached as ``partial``.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
