"""Essay and hashtag-labeled tweet corpora, and the tokenizer they share."""

from __future__ import annotations

import csv
import io
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field as dataclass_field
from enum import StrEnum
from pathlib import Path

from .errors import CorpusFormatError
from .tabular import COMMENT_PREFIX

logger = logging.getLogger(__name__)


TRAITS: tuple[str, ...] = ("EXT", "NEU", "AGR", "CON", "OPN")

# Runs of sentence-final punctuation
SENTENCE_END_RE = re.compile(r"[.!?]+")

HASHTAG_MARK = "#"


class Label(StrEnum):
    """Binary trait label."""

    YES = "yes"
    NO = "no"

    @property
    def sign(self) -> int:
        return 1 if self is Label.YES else -1

    def flipped(self) -> Label:
        return Label.NO if self is Label.YES else Label.YES


@dataclass(frozen=True)
class Token:
    """A lowercase surface form, optionally marked as a hashtag."""

    surface: str
    hashtag: bool = False

    def __str__(self) -> str:
        return f"{HASHTAG_MARK}{self.surface}" if self.hashtag else self.surface


def _is_word_char(ch: str) -> bool:
    return ch.isalnum()


def _strip_punctuation(piece: str) -> str:
    """Strip leading/trailing characters that are not letters or digits."""
    start = 0
    end = len(piece)
    while start < end and not _is_word_char(piece[start]):
        start += 1
    while end > start and not _is_word_char(piece[end - 1]):
        end -= 1
    return piece[start:end]


def tokenize(text: str) -> list[Token]:
    """Split text into lowercase tokens.

    Pieces are whitespace-separated; surrounding punctuation is stripped while
    internal apostrophes and hyphens survive ("can't", "well-known"). A piece
    starting with '#' yields a hashtag token. Pieces left empty are dropped.
    """
    tokens: list[Token] = []
    for piece in text.lower().split():
        hashtag = piece.startswith(HASHTAG_MARK)
        if hashtag:
            piece = piece.lstrip(HASHTAG_MARK)
        surface = _strip_punctuation(piece)
        if surface:
            tokens.append(Token(surface, hashtag))
    return tokens


def split_hashtags(tokens: Iterable[Token]) -> tuple[list[str], list[str]]:
    """Separate content surfaces from hashtag names."""
    content: list[str] = []
    hashtags: list[str] = []
    for token in tokens:
        (hashtags if token.hashtag else content).append(token.surface)
    return content, hashtags


def count_sentences(text: str) -> int:
    """Number of sentences, split on '.', '!', '?' runs (minimum 1)."""
    segments = SENTENCE_END_RE.split(text)
    count = sum(1 for s in segments if any(_is_word_char(ch) for ch in s))
    return max(1, count)


def count_punctuation(text: str) -> int:
    """Number of punctuation characters (not letters, digits or whitespace)."""
    return sum(1 for ch in text if not ch.isalnum() and not ch.isspace())


@dataclass(frozen=True)
class Document:
    """A tokenized essay with optional Big Five labels."""

    id: str
    tokens: tuple[str, ...]
    sentence_count: int
    raw_char_count: int
    punctuation_count: int = 0
    labels: Mapping[str, Label] | None = None
    text: str = ""

    def __post_init__(self):
        if self.sentence_count < 0 or self.raw_char_count < 0:
            raise ValueError("counts must be non-negative")
        if self.tokens and self.sentence_count < 1:
            raise ValueError(f"document {self.id!r} has tokens but no sentences")
        if self.labels is not None:
            missing = [t for t in TRAITS if t not in self.labels]
            if missing:
                raise ValueError(
                    f"document {self.id!r} is missing labels for {', '.join(missing)}"
                )

    @classmethod
    def from_text(
        cls, doc_id: str, text: str, labels: Mapping[str, Label] | None = None
    ) -> Document:
        """Tokenize raw text into a document. Hashtag names count as words."""
        surfaces = tuple(t.surface for t in tokenize(text))
        return cls(
            id=doc_id,
            tokens=surfaces,
            sentence_count=count_sentences(text),
            raw_char_count=len(text),
            punctuation_count=count_punctuation(text),
            labels=dict(labels) if labels is not None else None,
            text=text,
        )

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    def label(self, trait: str) -> Label:
        """Get the label for a trait, failing if the document is unlabeled."""
        if self.labels is None:
            raise CorpusFormatError(f"document {self.id!r} has no labels")
        return self.labels[trait]


@dataclass(frozen=True)
class LabeledTweet:
    """Tweet content tokens plus the emotion hashtags labeling it."""

    tokens: tuple[str, ...]
    hashtags: frozenset[str]

    def __post_init__(self):
        if not self.hashtags:
            raise ValueError("a labeled tweet needs at least one hashtag")


@dataclass(frozen=True)
class EssayFormat:
    """Column layout of an essay table."""

    id_column: str = "id"
    text_column: str = "text"
    label_columns: Mapping[str, str] = dataclass_field(
        default_factory=lambda: {trait: f"c{trait}" for trait in TRAITS}
    )
    yes_symbols: frozenset[str] = frozenset({"y"})
    no_symbols: frozenset[str] = frozenset({"n"})
    encoding: str = "utf-8"

    @classmethod
    def mypersonality(cls) -> EssayFormat:
        """Layout of the essays file distributed for the shared task."""
        return cls(id_column="#AUTHID", text_column="TEXT", encoding="latin-1")

    @property
    def columns(self) -> list[str]:
        return [self.id_column, self.text_column] + [
            self.label_columns[t] for t in TRAITS
        ]

    def parse_label(self, symbol: str) -> Label | None:
        value = symbol.strip().lower()
        if value in self.yes_symbols:
            return Label.YES
        if value in self.no_symbols:
            return Label.NO
        return None


DEFAULT_ESSAY_FORMAT = EssayFormat()


def parse_essays(
    text: str,
    essay_format: EssayFormat = DEFAULT_ESSAY_FORMAT,
    *,
    path: str | Path | None = None,
) -> list[Document]:
    """Parse essay table text into documents.

    Rows are numbered from 1 with the header as row 1.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        raise CorpusFormatError("missing header", path=path, row=1)

    positions: dict[str, int] = {}
    for name in essay_format.columns:
        if name not in header:
            raise CorpusFormatError(
                "missing header column", path=path, row=1, column=name
            )
        positions[name] = header.index(name)

    documents: list[Document] = []
    seen_ids: set[str] = set()
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            missing = header[len(row)] if len(row) < len(header) else None
            raise CorpusFormatError(
                f"expected {len(header)} fields, got {len(row)}",
                path=path,
                row=row_number,
                column=missing or f"{len(header) + 1}",
            )
        doc_id = row[positions[essay_format.id_column]].strip()
        if not doc_id:
            raise CorpusFormatError(
                "empty id", path=path, row=row_number, column=essay_format.id_column
            )
        if doc_id in seen_ids:
            raise CorpusFormatError(
                "duplicate id",
                path=path,
                row=row_number,
                column=essay_format.id_column,
                detail=repr(doc_id),
            )
        seen_ids.add(doc_id)

        labels: dict[str, Label] = {}
        for trait in TRAITS:
            column = essay_format.label_columns[trait]
            symbol = row[positions[column]]
            label = essay_format.parse_label(symbol)
            if label is None:
                raise CorpusFormatError(
                    "unknown label",
                    path=path,
                    row=row_number,
                    column=column,
                    detail=repr(symbol),
                )
            labels[trait] = label

        documents.append(
            Document.from_text(doc_id, row[positions[essay_format.text_column]], labels)
        )

    logger.info(
        "Loaded %d essays (%d tokens)",
        len(documents),
        sum(d.token_count for d in documents),
    )
    return documents


def load_essays(
    path: str | Path, essay_format: EssayFormat = DEFAULT_ESSAY_FORMAT
) -> list[Document]:
    """Load an essay table file."""
    with open(path, "r", encoding=essay_format.encoding, newline="") as f:
        return parse_essays(f.read(), essay_format, path=path)


def serialize_essays(
    documents: Sequence[Document], essay_format: EssayFormat = DEFAULT_ESSAY_FORMAT
) -> str:
    """Render documents as essay table text that `parse_essays` reads back."""
    out = io.StringIO(newline="")
    writer = csv.writer(out, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(essay_format.columns)
    yes = sorted(essay_format.yes_symbols)[0]
    no = sorted(essay_format.no_symbols)[0]
    for doc in documents:
        if doc.labels is None:
            raise CorpusFormatError(f"document {doc.id!r} has no labels")
        text = doc.text or " ".join(doc.tokens)
        row = [doc.id, text]
        row.extend(yes if doc.labels[t] is Label.YES else no for t in TRAITS)
        writer.writerow(row)
    return out.getvalue()


def save_essays(
    documents: Sequence[Document],
    path: str | Path,
    essay_format: EssayFormat = DEFAULT_ESSAY_FORMAT,
) -> None:
    with open(path, "w", encoding=essay_format.encoding, newline="") as f:
        f.write(serialize_essays(documents, essay_format))


def normalize_category(name: str) -> str:
    """Canonical form of an emotion category name ('#Excited' -> 'excited')."""
    return name.strip().lstrip(HASHTAG_MARK).strip().lower()


def load_inventory(path: str | Path) -> list[str]:
    """Load an emotion inventory: one category name per line, '#' optional.

    Lines starting with '# ' (hash, space) are comments.
    """
    names: list[str] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if line.startswith(COMMENT_PREFIX):
                continue
            name = normalize_category(line)
            if any(ch.isspace() for ch in name):
                raise CorpusFormatError(
                    "category name contains whitespace", path=path, line=number, detail=repr(name)
                )
            if name and name not in seen:
                seen.add(name)
                names.append(name)
    return names


def parse_tweet(line: str, emotion_inventory: Iterable[str]) -> LabeledTweet | None:
    """Parse one tweet; None when it carries no inventory hashtag."""
    inventory = (
        emotion_inventory
        if isinstance(emotion_inventory, (set, frozenset))
        else set(emotion_inventory)
    )
    content, hashtags = split_hashtags(tokenize(line))
    labels = frozenset(h for h in hashtags if h in inventory)
    if not labels:
        return None
    return LabeledTweet(tokens=tuple(content), hashtags=labels)


def load_tweets(path: str | Path, emotion_inventory: Iterable[str]) -> list[LabeledTweet]:
    """Load a tweet corpus, one tweet per line.

    Tweets without a hashtag from the inventory are dropped. Hashtags outside
    the inventory are discarded and never counted as content. Lines starting
    with '# ' (hash, space) are comments.
    """
    inventory = {normalize_category(name) for name in emotion_inventory}
    tweets: list[LabeledTweet] = []
    dropped = 0
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith(COMMENT_PREFIX):
                continue
            tweet = parse_tweet(line, inventory)
            if tweet is None:
                if line.strip():
                    dropped += 1
                continue
            tweets.append(tweet)
    if dropped:
        logger.info("Dropped %d tweets without an inventory hashtag", dropped)
    logger.info("Loaded %d labeled tweets from %s", len(tweets), path)
    return tweets
