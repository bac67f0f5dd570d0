"""Exception types shared across the package."""


class BTError(Exception):
    """Base class for all btembed errors."""


class EmptyAlphabetError(BTError):
    """A schema needs at least one token and one attribute."""


class DuplicateNameError(BTError):
    """Token or attribute names within a schema must be distinct."""


class NonReflexiveError(BTError):
    """Every attribute name must also appear among the tokens."""


class DimensionTooSmallError(BTError):
    """Embedding dimension below the supported minimum."""


class SchemaMismatchError(BTError):
    """Operands carry fingerprints of different embeddings."""


class BudgetExceededError(BTError):
    """Decoding exceeded its depth or node budget, the vector is likely malformed."""


class PathTooLongError(BTError):
    """Query path needs more slots than the position-code dimension supports."""


class SeparationUnachievableError(BTError):
    """Position codes failed to meet the overlap bound within the retry limit."""


class ArityExceededError(BTError):
    """Rule pattern is longer than the schema's argument attribute list."""


class NoParseError(BTError):
    """Rewriting halted with more than one slot and no applicable rule."""


class StepBudgetExceededError(BTError):
    """Rewriting did not terminate within the step budget."""


class InvalidSpecError(BTError):
    """Sweep specification is malformed."""


class FileFormatError(BTError):
    """Binary file has a bad magic, version, or inconsistent header."""
