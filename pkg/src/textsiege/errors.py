"""Exception types shared across the attack engine."""


class TextsiegeError(Exception):
    """Base class for all library errors."""


class PositionOutOfRange(TextsiegeError, IndexError):
    """An edit targets a token index outside the text."""


class OriginalMismatch(TextsiegeError, ValueError):
    """The token found at an edit position differs from the edit's recorded original."""


class EmptyText(TextsiegeError, ValueError):
    """An operation that needs at least one token received an empty text."""


class EmptyVector(TextsiegeError, ValueError):
    """An operation that needs at least one entry received an empty vector."""


class WordNotInVocabulary(TextsiegeError, KeyError):
    """Embedding lookup for a word with no stored vector."""


class UnsupportedAction(TextsiegeError, ValueError):
    """A candidate provider was asked for an action it cannot serve."""


class NoCandidates(TextsiegeError, ValueError):
    """No provider produced a candidate word at the requested position."""


class RemoteUnavailable(TextsiegeError, ConnectionError):
    """The remote service could not be reached."""


class ProtocolError(TextsiegeError, ValueError):
    """A remote service returned a malformed or contract-violating response."""


class ModelNotTrained(TextsiegeError, RuntimeError):
    """predict() was called on a victim with no trained parameters."""


class SingleClassDataset(TextsiegeError, ValueError):
    """Training data contains only one class."""


class EmptyDataset(TextsiegeError, ValueError):
    """Training data contains no samples."""


class EmptyRun(TextsiegeError, ValueError):
    """A metric aggregation received no attack results."""


class ZeroWordTokens(TextsiegeError, ValueError):
    """Perturbation rate is undefined for a text with no word tokens."""


class ParseError(TextsiegeError, ValueError):
    """A dataset or resource file line could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class LabelOutOfRange(TextsiegeError, ValueError):
    """A dataset row carries a label outside the declared class set."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ConfigError(TextsiegeError, ValueError):
    """A run configuration is missing keys, inconsistent, or points at absent files."""
