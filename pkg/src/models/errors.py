"""
Exception types raised by the engine
"""

from typing import Optional


class EngineError(Exception):
    """Base class for engine errors"""


class LabelMismatchError(EngineError, ValueError):
    """A label is missing from the basis it is declared against"""


class NonComplexError(EngineError):
    """A composite that must vanish does not"""


class CanonicalFormError(EngineError, ValueError):
    """A raw monomial cannot be brought into canonical form"""


class LayerIndexError(EngineError, IndexError):
    """A layer, face or degeneracy index is out of range"""


class NaturalityError(EngineError):
    """Both legs of a naturality square disagree"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class TruncationError(EngineError, ValueError):
    """The truncation is too small for the requested computation"""


class UngradedError(EngineError, ValueError):
    """A weight grading is required but the object has none"""


class ContainmentError(EngineError):
    """A vector escapes the sub-object it should lie in"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SurjectivityError(EngineError):
    """A map asserted to be surjective is not"""


class ResourceCapError(EngineError):
    """A block would exceed the configured basis-size cap"""

    def __init__(self, n: int, w: int, r: int, estimate: int, cap: int):
        super().__init__(
            f"block (n={n}, w={w}, r={r}) has {estimate} basis elements, cap is {cap}"
        )
        self.n = n
        self.w = w
        self.r = r
        self.estimate = estimate
        self.cap = cap


class SchemaError(EngineError, ValueError):
    """Malformed input text, with position"""

    def __init__(self, message: str, line: int, column: Optional[int] = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column
        self.reason = message
