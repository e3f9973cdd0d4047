"""Feature extraction: baseline, unigram, specificity and affect features."""

from __future__ import annotations

import hashlib
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import StrEnum
from functools import cached_property
from importlib import resources as importlib_resources
from pathlib import Path

import numpy as np

from .audit import Phase, record_reads
from .corpus import Document
from .errors import (
    FeatureConfigError,
    LexiconFormatError,
    ModelFormatError,
)
from .lexicon import (
    NOUN_IC,
    OSGOOD_DIMENSIONS,
    VERB_IC,
    AffectLexicon,
    LexiconKind,
)
from .tabular import Provenance, format_float, parse_float, read_lines, split_preamble, write_lines

logger = logging.getLogger(__name__)


class FeatureSource(StrEnum):
    """Feature families, in the order they are concatenated."""

    BASELINE = "baseline"
    UNIGRAM = "unigram"
    AIC = "aic"
    COARSE_AFF = "coarse_aff"
    BASIC_EMO = "basic_emo"
    FINE_EMO = "fine_emo"


SET_ORDER: tuple[FeatureSource, ...] = tuple(FeatureSource)

BASIC_EMOTION_COUNT = 8

# Separates the family from the feature name: "fine_emo:possessive"
NAME_SEPARATOR = ":"

LONG_WORD_LENGTH = 6


class AicMode(StrEnum):
    NOUNS = "nouns"
    VERBS = "verbs"
    BOTH = "both"


class AicDenominator(StrEnum):
    MATCHED = "matched"
    TOTAL = "total"


# Schema, vectors and matrices


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered, uniquely named features and the family each came from."""

    features: tuple[tuple[str, FeatureSource], ...]

    def __post_init__(self):
        names = [name for name, _ in self.features]
        if len(set(names)) != len(names):
            duplicates = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate feature names: {', '.join(duplicates)}")

    def __len__(self) -> int:
        return len(self.features)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.features)

    @cached_property
    def hash(self) -> str:
        digest = hashlib.sha256()
        for name, source in self.features:
            digest.update(f"{source}\t{name}\n".encode("utf-8"))
        return digest.hexdigest()[:16]

    def index(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def for_family(cls, source: FeatureSource, names: Iterable[str]) -> FeatureSchema:
        return cls(tuple((feature_name(source, n), source) for n in names))

    @classmethod
    def from_names(cls, names: Sequence[str]) -> FeatureSchema:
        """Rebuild a schema from qualified names like 'aic:nouns'."""
        features = []
        for name in names:
            prefix, sep, _ = name.partition(NAME_SEPARATOR)
            try:
                source = FeatureSource(prefix)
            except ValueError:
                source = None
            if not sep or source is None:
                raise ModelFormatError(
                    "feature name lacks a known family prefix", detail=repr(name)
                )
            features.append((name, source))
        return cls(tuple(features))

    @classmethod
    def concat(cls, schemas: Iterable[FeatureSchema]) -> FeatureSchema:
        return cls(tuple(f for s in schemas for f in s.features))


def feature_name(source: FeatureSource, name: str) -> str:
    return f"{source}{NAME_SEPARATOR}{name}"


@dataclass(frozen=True)
class FeatureVector:
    """Feature values for one document, aligned with a schema."""

    schema: FeatureSchema
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.schema):
            raise ValueError(
                f"{len(self.values)} values for a schema of {len(self.schema)} features"
            )
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("feature values must be finite")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, name: str) -> float:
        return self.values[self.schema.index(name)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.schema.names, self.values))

    @classmethod
    def concat(cls, parts: Sequence[FeatureVector]) -> FeatureVector:
        return cls(
            FeatureSchema.concat(p.schema for p in parts),
            tuple(v for p in parts for v in p.values),
        )


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Feature vectors of many documents as one float array."""

    ids: tuple[str, ...]
    schema: FeatureSchema
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.ids), len(self.schema)):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match "
                f"{len(self.ids)} documents x {len(self.schema)} features"
            )

    def __len__(self) -> int:
        return len(self.ids)

    def row(self, index: int) -> FeatureVector:
        return FeatureVector(self.schema, tuple(float(v) for v in self.values[index]))

    def rows(self) -> list[FeatureVector]:
        return [self.row(i) for i in range(len(self.ids))]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.schema.index(name)]

    def select_rows(self, indices: Sequence[int]) -> FeatureMatrix:
        idx = np.asarray(indices, dtype=int)
        return FeatureMatrix(
            tuple(self.ids[i] for i in indices), self.schema, self.values[idx]
        )

    @classmethod
    def from_vectors(
        cls, ids: Sequence[str], vectors: Sequence[FeatureVector]
    ) -> FeatureMatrix:
        if not vectors:
            raise ValueError("no feature vectors")
        schema = vectors[0].schema
        for vector in vectors:
            if vector.schema.hash != schema.hash:
                raise ValueError("feature vectors use different schemas")
        values = np.array([v.values for v in vectors], dtype=float)
        return cls(tuple(ids), schema, values)


def save_feature_matrix(
    matrix: FeatureMatrix, path: str | Path, provenance: Provenance | None = None
) -> None:
    """Write a header of feature names then one tab-separated row per document."""
    lines = []
    if provenance is not None:
        lines.append(provenance.comment_line())
    lines.append("\t".join(("id",) + matrix.schema.names))
    for doc_id, row in zip(matrix.ids, matrix.values):
        lines.append("\t".join([doc_id] + [format_float(v) for v in row]))
    write_lines(path, lines)


def load_feature_matrix(path: str | Path) -> FeatureMatrix:
    lines = read_lines(path)
    preamble = split_preamble(lines)
    header_number = preamble.body_start
    if header_number > len(lines):
        raise ModelFormatError("missing feature header", path=path, line=header_number)
    header = lines[header_number - 1].split("\t")
    if header[0] != "id":
        raise ModelFormatError(
            "feature header must start with 'id'", path=path, line=header_number
        )
    try:
        schema = FeatureSchema.from_names(header[1:])
    except ModelFormatError as e:
        raise ModelFormatError(e.message, path=path, line=header_number, detail=e.detail)

    ids: list[str] = []
    rows: list[list[float]] = []
    for number in range(header_number + 1, len(lines) + 1):
        line = lines[number - 1]
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(header):
            raise ModelFormatError(
                f"expected {len(header)} fields, got {len(parts)}", path=path, line=number
            )
        ids.append(parts[0])
        rows.append(
            [
                parse_float(p, error=ModelFormatError, path=path, line=number, column=n)
                for p, n in zip(parts[1:], header[1:])
            ]
        )
    if len(set(ids)) != len(ids):
        raise ModelFormatError("duplicate document id", path=path)
    values = np.array(rows, dtype=float).reshape(len(ids), len(schema))
    return FeatureMatrix(tuple(ids), schema, values)


# Category lexicons for the baseline


@dataclass(frozen=True)
class WordCategory:
    """Exact words plus prefix patterns ('friend*') of one category."""

    name: str
    words: frozenset[str]
    prefixes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.words and not self.prefixes:
            raise ValueError(f"category {self.name!r} has no patterns")

    def matches(self, token: str) -> bool:
        if token in self.words:
            return True
        return any(token.startswith(p) for p in self.prefixes)

    @classmethod
    def from_patterns(cls, name: str, patterns: Iterable[str]) -> WordCategory:
        words = set()
        prefixes = []
        for pattern in patterns:
            pattern = pattern.strip().lower()
            if pattern.endswith("*"):
                prefixes.append(pattern.rstrip("*"))
            elif pattern:
                words.add(pattern)
        return cls(name, frozenset(words), tuple(sorted(set(prefixes))))


@dataclass(frozen=True)
class CategoryLexiconSet:
    """Named word categories counted by the baseline feature set."""

    categories: tuple[WordCategory, ...]

    def __post_init__(self):
        names = [c.name for c in self.categories]
        if len(set(names)) != len(names):
            raise ValueError("duplicate category names")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.categories)


def parse_category_set(
    lines: Sequence[str], *, path: str | Path | None = None
) -> CategoryLexiconSet:
    """Parse '[category]' sections followed by one pattern per line."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if not current:
                raise LexiconFormatError("empty category name", path=path, line=number)
            if current in sections:
                raise LexiconFormatError(
                    "duplicate category", path=path, line=number, detail=repr(current)
                )
            sections[current] = []
            continue
        if current is None:
            raise LexiconFormatError(
                "pattern before the first [category]", path=path, line=number
            )
        sections[current].append(line)

    categories = []
    for name, patterns in sections.items():
        if not patterns:
            raise LexiconFormatError(
                "category has no patterns", path=path, detail=repr(name)
            )
        categories.append(WordCategory.from_patterns(name, patterns))
    return CategoryLexiconSet(tuple(categories))


def load_category_set(path: str | Path) -> CategoryLexiconSet:
    return parse_category_set(read_lines(path), path=path)


def load_liwc_dictionary(path: str | Path) -> CategoryLexiconSet:
    """Read a LIWC-style '.dic' file into a category set.

    The file opens with a '%'-delimited block of 'id<TAB>name' lines,
    followed by 'pattern<TAB>id<TAB>id...' lines.
    """
    lines = read_lines(path)
    names: dict[str, str] = {}
    patterns: dict[str, list[str]] = {}
    delimiters = 0
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "%":
            delimiters += 1
            continue
        parts = line.split()
        if delimiters == 1:
            if len(parts) < 2:
                raise LexiconFormatError("expected 'id name'", path=path, line=number)
            names[parts[0]] = parts[1]
            patterns.setdefault(parts[0], [])
        elif delimiters >= 2:
            for category_id in parts[1:]:
                if category_id not in names:
                    raise LexiconFormatError(
                        "unknown category id", path=path, line=number, detail=category_id
                    )
                patterns[category_id].append(parts[0])
    categories = tuple(
        WordCategory.from_patterns(names[cid], pats)
        for cid, pats in patterns.items()
        if pats
    )
    return CategoryLexiconSet(categories)


def default_category_set() -> CategoryLexiconSet:
    """The open category lists shipped with the package.

    They approximate the proprietary category dictionaries; absolute scores
    obtained with them are not comparable.
    """
    text = (
        importlib_resources.files("affectlex")
        .joinpath("data/mairesse_open.cats")
        .read_text(encoding="utf-8")
    )
    return parse_category_set(text.splitlines(), path="mairesse_open.cats")


# Vocabulary


@dataclass(frozen=True)
class Vocabulary:
    """Unigram vocabulary fixed from training documents."""

    terms: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.terms)


def build_vocabulary(
    docs: Iterable[Document], *, min_count: int = 1, max_terms: int | None = None
) -> Vocabulary:
    """Terms occurring at least `min_count` times, most frequent first."""
    counts: Counter[str] = Counter()
    read: list[str] = []
    for doc in docs:
        read.append(doc.id)
        counts.update(doc.tokens)
    record_reads(Phase.VOCABULARY, read)
    kept = [(t, c) for t, c in counts.items() if c >= min_count]
    kept.sort(key=lambda item: (-item[1], item[0]))
    if max_terms is not None:
        kept = kept[:max_terms]
    return Vocabulary(tuple(sorted(t for t, _ in kept)))


# Per-family extraction


def _category_sums(
    counts: Mapping[str, int], lexicon: AffectLexicon
) -> list[list[float]]:
    """Per category, the score * count products of the document's terms."""
    buckets: list[list[float]] = [[] for _ in lexicon.categories]
    index = lexicon.term_index
    for term, count in counts.items():
        for position, score in index.get(term, ()):
            buckets[position].append(score * count)
    return buckets


def _averages(
    counts: Mapping[str, int], total: int, lexicon: AffectLexicon
) -> list[float]:
    if total == 0:
        return [0.0] * len(lexicon.categories)
    # fsum is exactly rounded, so token order cannot change the result
    return [math.fsum(bucket) / total for bucket in _category_sums(counts, lexicon)]


def avg_association(doc: Document, lex: AffectLexicon, category: str) -> float:
    """Sum of the category scores of the document's tokens over its token count."""
    scores = lex.category(category)
    if not doc.tokens:
        return 0.0
    counts = Counter(doc.tokens)
    products = [scores[t] * c for t, c in counts.items() if t in scores]
    return math.fsum(products) / len(doc.tokens)


def _require_kind(lex: AffectLexicon, kind: LexiconKind, family: FeatureSource) -> None:
    if lex.kind != kind:
        raise FeatureConfigError(
            f"feature set '{family}' needs a {kind} lexicon, got {lex.kind}"
        )


def fine_emotion_features(doc: Document, hashtag_lex: AffectLexicon) -> FeatureVector:
    """One average association per hashtag emotion, in lexicon order."""
    _require_kind(hashtag_lex, LexiconKind.PMI_ASSOCIATION, FeatureSource.FINE_EMO)
    schema = FeatureSchema.for_family(FeatureSource.FINE_EMO, hashtag_lex.categories)
    values = _averages(Counter(doc.tokens), len(doc.tokens), hashtag_lex)
    return FeatureVector(schema, tuple(values))


def basic_emotion_features(doc: Document, emolex: AffectLexicon) -> FeatureVector:
    """Average association with each of the eight basic emotions."""
    _require_kind(emolex, LexiconKind.BINARY_ASSOCIATION, FeatureSource.BASIC_EMO)
    if len(emolex.categories) != BASIC_EMOTION_COUNT:
        raise FeatureConfigError(
            f"basic emotion lexicon must have {BASIC_EMOTION_COUNT} categories, "
            f"got {len(emolex.categories)}"
        )
    schema = FeatureSchema.for_family(FeatureSource.BASIC_EMO, emolex.categories)
    values = _averages(Counter(doc.tokens), len(doc.tokens), emolex)
    return FeatureVector(schema, tuple(values))


def coarse_affect_features(
    doc: Document,
    osgood_lex: AffectLexicon,
    dimensions: Sequence[str] = OSGOOD_DIMENSIONS,
) -> FeatureVector:
    """Average evaluativeness, potency and activity (or a subset of them)."""
    missing = [d for d in OSGOOD_DIMENSIONS if d not in osgood_lex.categories]
    if missing:
        raise FeatureConfigError(
            f"Osgood lexicon is missing dimension(s): {', '.join(missing)}"
        )
    unknown = [d for d in dimensions if d not in OSGOOD_DIMENSIONS]
    if unknown or not dimensions:
        raise FeatureConfigError(f"unknown Osgood dimension(s): {unknown or 'none'}")
    values = tuple(avg_association(doc, osgood_lex, d) for d in dimensions)
    return FeatureVector(
        FeatureSchema.for_family(FeatureSource.COARSE_AFF, dimensions), values
    )


def _aic_categories(mode: AicMode) -> tuple[str, ...]:
    if mode == AicMode.NOUNS:
        return (NOUN_IC,)
    if mode == AicMode.VERBS:
        return (VERB_IC,)
    return (NOUN_IC, VERB_IC)


def aic_feature_name(mode: AicMode, denominator: AicDenominator) -> str:
    if denominator == AicDenominator.TOTAL:
        return f"{mode}_total"
    return str(mode)


def aic_features(
    doc: Document,
    ic_lex: AffectLexicon,
    mode: AicMode | str = AicMode.BOTH,
    *,
    denominator: AicDenominator | str = AicDenominator.MATCHED,
) -> FeatureVector:
    """Average information content of the document's words.

    Each (token occurrence, part of speech) hit in the selected categories is
    one match; the sum of matched scores is divided by the number of matches,
    or by the token count when `denominator` is 'total'.
    """
    mode = AicMode(mode)
    denominator = AicDenominator(denominator)
    _require_kind(ic_lex, LexiconKind.INFORMATION_CONTENT, FeatureSource.AIC)
    schema = FeatureSchema.for_family(
        FeatureSource.AIC, [aic_feature_name(mode, denominator)]
    )
    counts = Counter(doc.tokens)
    products: list[float] = []
    matches = 0
    for category in _aic_categories(mode):
        scores = ic_lex.category(category)
        for term, count in counts.items():
            if term in scores:
                products.append(scores[term] * count)
                matches += count
    divisor = matches if denominator == AicDenominator.MATCHED else len(doc.tokens)
    value = math.fsum(products) / divisor if divisor else 0.0
    return FeatureVector(schema, (value,))


def unigram_features(doc: Document, vocabulary: Vocabulary) -> FeatureVector:
    """Relative frequency of each vocabulary term."""
    schema = FeatureSchema.for_family(FeatureSource.UNIGRAM, vocabulary.terms)
    total = len(doc.tokens)
    if total == 0:
        return FeatureVector(schema, (0.0,) * len(vocabulary))
    counts = Counter(doc.tokens)
    return FeatureVector(schema, tuple(counts.get(t, 0) / total for t in vocabulary.terms))


def unigram_block(
    docs: Sequence[Document], vocabulary: Vocabulary
) -> tuple[FeatureSchema, np.ndarray]:
    """Relative frequencies of many documents as one array."""
    schema = FeatureSchema.for_family(FeatureSource.UNIGRAM, vocabulary.terms)
    position = {term: i for i, term in enumerate(vocabulary.terms)}
    values = np.zeros((len(docs), len(vocabulary)))
    for row, doc in enumerate(docs):
        if not doc.tokens:
            continue
        for term, count in Counter(doc.tokens).items():
            column = position.get(term)
            if column is not None:
                values[row, column] = count / len(doc.tokens)
    return schema, values


STRUCTURAL_FEATURES: tuple[str, ...] = (
    "word_count",
    "words_per_sentence",
    "type_token_ratio",
    "long_words",
    "punctuation",
)


def baseline_features(doc: Document, cats: CategoryLexiconSet) -> FeatureVector:
    """Structural statistics plus the match rate of every word category."""
    schema = FeatureSchema.for_family(
        FeatureSource.BASELINE, STRUCTURAL_FEATURES + cats.names
    )
    total = len(doc.tokens)
    if total == 0:
        return FeatureVector(schema, (0.0,) * len(schema))

    counts = Counter(doc.tokens)
    words_per_sentence = total / doc.sentence_count if doc.sentence_count else 0.0
    long_words = sum(c for t, c in counts.items() if len(t) > LONG_WORD_LENGTH)
    values = [
        float(total),
        words_per_sentence,
        len(counts) / total,
        long_words / total,
        doc.punctuation_count / total,
    ]
    for category in cats.categories:
        matched = sum(c for t, c in counts.items() if category.matches(t))
        values.append(matched / total)
    return FeatureVector(schema, tuple(values))


# Assembly


@dataclass(frozen=True)
class FeatureConfig:
    """Which feature families to extract, and their variants."""

    sets: tuple[FeatureSource, ...]
    osgood_dimensions: tuple[str, ...] = OSGOOD_DIMENSIONS
    aic_mode: AicMode = AicMode.BOTH
    aic_denominator: AicDenominator = AicDenominator.MATCHED
    unigram_min_count: int = 1

    def __post_init__(self):
        requested = {FeatureSource(s) for s in self.sets}
        # Normalize to the fixed concatenation order
        object.__setattr__(
            self, "sets", tuple(s for s in SET_ORDER if s in requested)
        )
        object.__setattr__(self, "aic_mode", AicMode(self.aic_mode))
        object.__setattr__(self, "aic_denominator", AicDenominator(self.aic_denominator))
        object.__setattr__(self, "osgood_dimensions", tuple(self.osgood_dimensions))

    @property
    def uses_unigrams(self) -> bool:
        return FeatureSource.UNIGRAM in self.sets

    def describe(self) -> dict[str, object]:
        return {
            "sets": [str(s) for s in self.sets],
            "osgood_dimensions": list(self.osgood_dimensions),
            "aic_mode": str(self.aic_mode),
            "aic_denominator": str(self.aic_denominator),
            "unigram_min_count": self.unigram_min_count,
        }


@dataclass(frozen=True)
class FeatureResources:
    """Lexicons shared read-only by all extraction."""

    hashtag: AffectLexicon | None = None
    emolex: AffectLexicon | None = None
    osgood: AffectLexicon | None = None
    ic: AffectLexicon | None = None
    categories: CategoryLexiconSet | None = None
    vocabulary: Vocabulary | None = None

    def with_vocabulary(self, vocabulary: Vocabulary) -> FeatureResources:
        return replace(self, vocabulary=vocabulary)


# Resource each family needs, and how to name it in errors
_REQUIRED_RESOURCE: dict[FeatureSource, tuple[str, str]] = {
    FeatureSource.BASELINE: ("categories", "category lexicon"),
    FeatureSource.UNIGRAM: ("vocabulary", "vocabulary"),
    FeatureSource.AIC: ("ic", "specificity lexicon"),
    FeatureSource.COARSE_AFF: ("osgood", "Osgood lexicon"),
    FeatureSource.BASIC_EMO: ("emolex", "basic emotion lexicon"),
    FeatureSource.FINE_EMO: ("hashtag", "hashtag emotion lexicon"),
}


class FeatureExtractor:
    """Extracts the configured feature families from documents."""

    def __init__(self, config: FeatureConfig, resources: FeatureResources):
        if not config.sets:
            raise FeatureConfigError("no feature sets enabled")
        for source in config.sets:
            if source == FeatureSource.UNIGRAM:
                continue  # the vocabulary may be supplied per call
            attribute, description = _REQUIRED_RESOURCE[source]
            if getattr(resources, attribute) is None:
                raise FeatureConfigError(
                    f"feature set '{source}' is enabled but no {description} is loaded"
                )
        self.config = config
        self.resources = resources
        self._check_lexicons()

    def _check_lexicons(self) -> None:
        r = self.resources
        sets = self.config.sets
        if FeatureSource.FINE_EMO in sets and r.hashtag is not None:
            _require_kind(r.hashtag, LexiconKind.PMI_ASSOCIATION, FeatureSource.FINE_EMO)
        if FeatureSource.BASIC_EMO in sets and r.emolex is not None:
            _require_kind(r.emolex, LexiconKind.BINARY_ASSOCIATION, FeatureSource.BASIC_EMO)
            if len(r.emolex.categories) != BASIC_EMOTION_COUNT:
                raise FeatureConfigError(
                    f"basic emotion lexicon must have {BASIC_EMOTION_COUNT} "
                    f"categories, got {len(r.emolex.categories)}"
                )
        if FeatureSource.AIC in sets and r.ic is not None:
            _require_kind(r.ic, LexiconKind.INFORMATION_CONTENT, FeatureSource.AIC)

    def _vocabulary(self, vocabulary: Vocabulary | None) -> Vocabulary:
        if vocabulary is None:
            vocabulary = self.resources.vocabulary
        if vocabulary is None:
            raise FeatureConfigError(
                "feature set 'unigram' is enabled but no vocabulary is available"
            )
        return vocabulary

    def _family(
        self, source: FeatureSource, doc: Document, vocabulary: Vocabulary | None
    ) -> FeatureVector:
        r = self.resources
        c = self.config
        match source:
            case FeatureSource.BASELINE:
                assert r.categories is not None
                return baseline_features(doc, r.categories)
            case FeatureSource.UNIGRAM:
                return unigram_features(doc, self._vocabulary(vocabulary))
            case FeatureSource.AIC:
                assert r.ic is not None
                return aic_features(doc, r.ic, c.aic_mode, denominator=c.aic_denominator)
            case FeatureSource.COARSE_AFF:
                assert r.osgood is not None
                return coarse_affect_features(doc, r.osgood, c.osgood_dimensions)
            case FeatureSource.BASIC_EMO:
                assert r.emolex is not None
                return basic_emotion_features(doc, r.emolex)
            case FeatureSource.FINE_EMO:
                assert r.hashtag is not None
                return fine_emotion_features(doc, r.hashtag)
        raise FeatureConfigError(f"unknown feature set {source!r}")

    def extract(self, doc: Document, vocabulary: Vocabulary | None = None) -> FeatureVector:
        """Concatenate the enabled families for one document."""
        return FeatureVector.concat(
            [self._family(s, doc, vocabulary) for s in self.config.sets]
        )

    def family_block(
        self,
        source: FeatureSource,
        docs: Sequence[Document],
        vocabulary: Vocabulary | None = None,
        *,
        jobs: int = 1,
    ) -> tuple[FeatureSchema, np.ndarray]:
        """One family's values for many documents."""
        if source == FeatureSource.UNIGRAM:
            return unigram_block(docs, self._vocabulary(vocabulary))

        def one(doc: Document) -> FeatureVector:
            return self._family(source, doc, vocabulary)

        if jobs > 1 and len(docs) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                vectors = list(pool.map(one, docs))
        else:
            vectors = [one(d) for d in docs]
        if vectors:
            schema = vectors[0].schema
        else:
            schema = self._family(source, _EMPTY_DOCUMENT, vocabulary).schema
        values = np.array([v.values for v in vectors], dtype=float).reshape(
            len(docs), len(schema)
        )
        return schema, values

    def static_blocks(
        self, docs: Sequence[Document], *, jobs: int = 1
    ) -> dict[FeatureSource, tuple[FeatureSchema, np.ndarray]]:
        """Every enabled family that does not depend on a vocabulary."""
        return {
            s: self.family_block(s, docs, jobs=jobs)
            for s in self.config.sets
            if s != FeatureSource.UNIGRAM
        }

    def compose(
        self,
        ids: Sequence[str],
        blocks: Mapping[FeatureSource, tuple[FeatureSchema, np.ndarray]],
    ) -> FeatureMatrix:
        """Join family blocks in the fixed family order."""
        parts = [blocks[s] for s in self.config.sets]
        schema = FeatureSchema.concat(schema for schema, _ in parts)
        values = np.hstack([block for _, block in parts]) if parts else np.zeros((len(ids), 0))
        return FeatureMatrix(tuple(ids), schema, values)

    def extract_matrix(
        self,
        docs: Sequence[Document],
        vocabulary: Vocabulary | None = None,
        *,
        jobs: int = 1,
    ) -> FeatureMatrix:
        blocks = self.static_blocks(docs, jobs=jobs)
        if self.config.uses_unigrams:
            blocks[FeatureSource.UNIGRAM] = self.family_block(
                FeatureSource.UNIGRAM, docs, self._vocabulary(vocabulary), jobs=jobs
            )
        matrix = self.compose([d.id for d in docs], blocks)
        logger.info(
            "Extracted %d features for %d documents (schema %s)",
            len(matrix.schema),
            len(docs),
            matrix.schema.hash,
        )
        return matrix


_EMPTY_DOCUMENT = Document(id="", tokens=(), sentence_count=0, raw_char_count=0)


def assemble(
    doc: Document, config: FeatureConfig, resources: FeatureResources
) -> FeatureVector:
    """Feature vector of one document for the enabled families."""
    return FeatureExtractor(config, resources).extract(doc)
