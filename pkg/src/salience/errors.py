"""Exception types shared across the package.

Everything raised on bad input data derives from SalienceError so the
command line tool can map data problems to a single exit code.
"""


class SalienceError(Exception):
    """Base class for all data and configuration errors."""


class ConlluFormatError(SalienceError):
    """A CoNLL-U line could not be parsed (wrong column count, bad integer)."""


class TreeIntegrityError(SalienceError):
    """A sentence is not a single rooted tree (cycle, zero or many roots)."""


class EmptyDocumentError(SalienceError):
    """A document body contained no sentences."""


class ManifestError(SalienceError):
    """A corpus manifest is malformed or contains duplicate doc ids."""


class CorpusIOError(SalienceError):
    """A file referenced by a manifest could not be read."""


class SpanReferenceError(SalienceError):
    """A span or document reference points outside the data it refers to."""


class PartMissingError(SalienceError):
    """A document part (body or abstract) was requested but is absent."""


class ConfigError(SalienceError):
    """Invalid model or pipeline configuration."""


class TrainingDivergedError(SalienceError):
    """Training loss became non-finite."""

    def __init__(self, message: str, epoch: int | None = None,
                 learning_rate: float | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.learning_rate = learning_rate


class EmptyGoldError(SalienceError):
    """Signal: a document has no gold terms for a scope and must be skipped."""
