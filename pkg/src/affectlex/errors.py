"""Exception hierarchy shared by all affectlex modules."""

from __future__ import annotations

from pathlib import Path


class AffectlexError(Exception):
    """Base class for every error raised by affectlex."""

    pass


class DataError(AffectlexError):
    """Input data that does not match its declared format.

    The location is kept separately from the message so callers can inspect
    it. It renders as "<path>: <message> at line 3" for line-oriented files
    and "... at row 2, column cNEU" for tables.
    """

    def __init__(
        self,
        message: str,
        *,
        path: str | Path | None = None,
        line: int | None = None,
        row: int | None = None,
        column: str | None = None,
        detail: str | None = None,
    ):
        self.message = message
        self.detail = detail
        self.path = str(path) if path is not None else None
        self.line = line
        self.row = row
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        location = []
        if self.line is not None:
            location.append(f"line {self.line}")
        if self.row is not None:
            location.append(f"row {self.row}")
        if self.column:
            location.append(f"column {self.column}")
        text = self.message
        if location:
            text = f"{text} at {', '.join(location)}"
        if self.detail:
            text = f"{text}: {self.detail}"
        if self.path:
            text = f"{self.path}: {text}"
        return text


class CorpusFormatError(DataError):
    """Malformed essay table or tweet corpus."""

    pass


class LexiconFormatError(DataError):
    """Malformed lexicon, synset table or category file."""

    pass


class ModelFormatError(DataError):
    """Malformed model or feature matrix file."""

    pass


class ConfigError(DataError):
    """Invalid or incomplete experiment configuration."""

    pass


class UnknownCategoryError(AffectlexError):
    """A category was requested that the lexicon does not define."""

    pass


class FeatureConfigError(AffectlexError):
    """Feature sets that cannot be extracted with the given resources."""

    pass


class TrainingError(AffectlexError):
    """Training data a classifier cannot be fit on."""

    pass


class SchemaMismatchError(TrainingError):
    """Feature vector built under a different schema than the model."""

    pass


class EvaluationError(AffectlexError):
    """Precondition failure in cross-validation, significance tests or ranking."""

    pass
