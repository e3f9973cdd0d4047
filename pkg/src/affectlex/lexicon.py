"""Affect and specificity lexicons: building, loading and saving."""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from enum import StrEnum
from functools import cached_property
from pathlib import Path

from .corpus import LabeledTweet
from .errors import CorpusFormatError, LexiconFormatError, UnknownCategoryError
from .tabular import Provenance, parse_float, read_lines, split_preamble, write_lines

logger = logging.getLogger(__name__)


BASIC_EMOTIONS: tuple[str, ...] = (
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
)

OSGOOD_DIMENSIONS: tuple[str, ...] = ("evaluative", "potency", "activity")

NOUN_IC = "noun_ic"
VERB_IC = "verb_ic"

DEFAULT_MIN_WORD_FREQ = 5

# Reserved metadata key fixing category order in lexicon files
CATEGORIES_KEY = "categories"
KIND_KEY = "kind"


class LexiconKind(StrEnum):
    """What the scores of a lexicon mean."""

    PMI_ASSOCIATION = "pmi_association"
    BINARY_ASSOCIATION = "binary_association"
    OSGOOD_DIMENSION = "osgood_dimension"
    INFORMATION_CONTENT = "information_content"


class PartOfSpeech(StrEnum):
    NOUN = "noun"
    VERB = "verb"

    @classmethod
    def parse(cls, text: str) -> PartOfSpeech | None:
        value = text.strip().lower()
        if value in ("noun", "n"):
            return cls.NOUN
        if value in ("verb", "v"):
            return cls.VERB
        return None


@dataclass(frozen=True)
class AffectLexicon:
    """Category -> (term -> score) association lexicon.

    Category order is significant: it defines feature order downstream.
    """

    kind: LexiconKind
    categories: tuple[str, ...]
    entries: Mapping[str, Mapping[str, float]]
    metadata: Mapping[str, str] = dataclass_field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.categories)) != len(self.categories):
            raise ValueError("duplicate category names")
        for name in self.categories:
            # names are space-separated in the "#categories=" header
            if not name or any(ch.isspace() for ch in name):
                raise ValueError(f"category name {name!r} is empty or contains whitespace")
        known = set(self.categories)
        for category, terms in self.entries.items():
            if category not in known:
                raise ValueError(f"entry category {category!r} not in categories")
            for term, score in terms.items():
                problem = _score_error(self.kind, score)
                if problem:
                    raise ValueError(f"{category}/{term}: {problem}")

    def __len__(self) -> int:
        """Number of (category, term) entries."""
        return sum(len(terms) for terms in self.entries.values())

    def has_category(self, category: str) -> bool:
        return category in self.entries or category in self.categories

    def category(self, category: str) -> Mapping[str, float]:
        """Term scores of one category."""
        if category not in self.categories:
            raise UnknownCategoryError(f"unknown category {category!r}")
        return self.entries.get(category, {})

    def score(self, category: str, term: str) -> float | None:
        """Score of a term in a category, or None when there is no entry."""
        return self.category(category).get(term)

    @property
    def terms(self) -> set[str]:
        """All terms with at least one entry."""
        result: set[str] = set()
        for terms in self.entries.values():
            result.update(terms)
        return result

    @cached_property
    def term_index(self) -> dict[str, tuple[tuple[int, float], ...]]:
        """Term -> ((category position, score), ...) for fast averaging."""
        index: dict[str, list[tuple[int, float]]] = {}
        for position, category in enumerate(self.categories):
            for term, score in self.entries.get(category, {}).items():
                index.setdefault(term, []).append((position, score))
        return {term: tuple(pairs) for term, pairs in index.items()}


def _score_error(kind: LexiconKind, score: float) -> str | None:
    if not math.isfinite(score):
        return "score must be finite"
    if kind == LexiconKind.BINARY_ASSOCIATION and score not in (0.0, 1.0):
        return "binary score must be 0 or 1"
    if kind == LexiconKind.INFORMATION_CONTENT and score < 0:
        return "information content must be non-negative"
    return None


# Co-occurrence counting


@dataclass(frozen=True)
class CountTable:
    """Tweet-level presence counts of words, categories and their pairs."""

    n_tweets: int
    word_count: Mapping[str, int]
    cat_count: Mapping[str, int]
    joint_count: Mapping[tuple[str, str], int]

    def joint(self, term: str, category: str) -> int:
        return self.joint_count.get((term, category), 0)


def _count_shard(tweets: Sequence[LabeledTweet]) -> CountTable:
    word_count: Counter[str] = Counter()
    cat_count: Counter[str] = Counter()
    joint_count: Counter[tuple[str, str]] = Counter()
    for tweet in tweets:
        present = set(tweet.tokens)
        word_count.update(present)
        cat_count.update(tweet.hashtags)
        for category in tweet.hashtags:
            joint_count.update((term, category) for term in present)
    return CountTable(
        n_tweets=len(tweets),
        word_count=dict(word_count),
        cat_count=dict(cat_count),
        joint_count=dict(joint_count),
    )


def merge_counts(a: CountTable, b: CountTable) -> CountTable:
    """Combine counts of two disjoint tweet shards."""
    word_count = Counter(a.word_count)
    word_count.update(b.word_count)
    cat_count = Counter(a.cat_count)
    cat_count.update(b.cat_count)
    joint_count = Counter(a.joint_count)
    joint_count.update(b.joint_count)
    return CountTable(
        n_tweets=a.n_tweets + b.n_tweets,
        word_count=dict(word_count),
        cat_count=dict(cat_count),
        joint_count=dict(joint_count),
    )


def count_cooccurrences(tweets: Sequence[LabeledTweet], *, jobs: int = 1) -> CountTable:
    """Count word/category co-occurrence at tweet level.

    A word counts at most once per tweet; a tweet with k hashtags contributes
    to all k categories.
    """
    if not tweets:
        raise CorpusFormatError("empty corpus")
    if jobs <= 1 or len(tweets) < 2 * jobs:
        counts = _count_shard(tweets)
    else:
        size = math.ceil(len(tweets) / jobs)
        shards = [tweets[i : i + size] for i in range(0, len(tweets), size)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            partial = list(pool.map(_count_shard, shards))
        counts = partial[0]
        for other in partial[1:]:
            counts = merge_counts(counts, other)
    logger.info(
        "Counted %d tweets, %d word types, %d categories",
        counts.n_tweets,
        len(counts.word_count),
        len(counts.cat_count),
    )
    return counts


def pmi(joint: int, word: int, category: int, n_tweets: int) -> float:
    """Base-2 pointwise mutual information from presence counts."""
    return math.log2(joint * n_tweets / (word * category))


def build_pmi_lexicon(
    counts: CountTable,
    *,
    min_word_freq: int = DEFAULT_MIN_WORD_FREQ,
    keep_nonpositive: bool = False,
    categories: Sequence[str] | None = None,
    source: str = "",
) -> AffectLexicon:
    """Build a word-emotion PMI lexicon from co-occurrence counts.

    Pairs that never co-occur get no entry. Words seen in fewer than
    `min_word_freq` tweets are excluded, and entries with score <= 0 are
    dropped unless `keep_nonpositive`.
    """
    if min_word_freq < 1:
        raise ValueError("min_word_freq must be at least 1")

    if categories is None:
        ordered = tuple(sorted(counts.cat_count))
    else:
        ordered = tuple(categories)
        extra = sorted(set(counts.cat_count) - set(ordered))
        ordered += tuple(extra)

    entries: dict[str, dict[str, float]] = {c: {} for c in ordered}
    for (term, category), joint in sorted(counts.joint_count.items()):
        if joint <= 0:
            continue
        word = counts.word_count[term]
        if word < min_word_freq:
            continue
        score = pmi(joint, word, counts.cat_count[category], counts.n_tweets)
        if score <= 0 and not keep_nonpositive:
            continue
        entries[category][term] = score

    metadata = {
        "source": source or "tweet co-occurrence counts",
        "n_tweets": str(counts.n_tweets),
        "min_word_freq": str(min_word_freq),
        "keep_nonpositive": str(keep_nonpositive).lower(),
        "log_base": "2",
    }
    lexicon = AffectLexicon(
        kind=LexiconKind.PMI_ASSOCIATION,
        categories=ordered,
        entries=entries,
        metadata=metadata,
    )
    logger.info(
        "Built PMI lexicon: %d categories, %d terms, %d entries",
        len(ordered),
        len(lexicon.terms),
        len(lexicon),
    )
    return lexicon


# Lexicon TSV format


def parse_affect_lexicon(
    lines: Sequence[str],
    expected_kind: LexiconKind | None = None,
    *,
    path: str | Path | None = None,
) -> AffectLexicon:
    """Parse lexicon TSV lines: '#kind=<kind>' then category, term, score."""
    preamble = split_preamble(lines)
    kind_text = preamble.metadata.get(KIND_KEY)
    if kind_text is None:
        raise LexiconFormatError("missing '#kind=' header", path=path, line=1)
    try:
        kind = LexiconKind(kind_text)
    except ValueError:
        raise LexiconFormatError(
            "unknown lexicon kind", path=path, line=1, detail=repr(kind_text)
        ) from None
    if expected_kind is not None and kind != expected_kind:
        raise LexiconFormatError(
            f"expected a {expected_kind} lexicon, found {kind}", path=path, line=1
        )

    categories: list[str] = []
    declared = preamble.metadata.get(CATEGORIES_KEY)
    if declared:
        categories.extend(declared.split())
    known = set(categories)
    entries: dict[str, dict[str, float]] = {c: {} for c in categories}

    for number in range(preamble.body_start, len(lines) + 1):
        line = lines[number - 1].rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconFormatError(
                f"expected 3 tab-separated fields, got {len(parts)}",
                path=path,
                line=number,
            )
        category, term, score_text = (p.strip() for p in parts)
        if not category or not term:
            raise LexiconFormatError("empty category or term", path=path, line=number)
        if any(ch.isspace() for ch in category):
            raise LexiconFormatError(
                "category name contains whitespace", path=path, line=number, detail=repr(category)
            )
        score = parse_float(
            score_text, error=LexiconFormatError, path=path, line=number
        )
        problem = _score_error(kind, score)
        if problem:
            raise LexiconFormatError(problem, path=path, line=number)
        if category not in known:
            known.add(category)
            categories.append(category)
            entries[category] = {}
        if term in entries[category]:
            raise LexiconFormatError(
                "duplicate entry", path=path, line=number, detail=f"{category}/{term}"
            )
        entries[category][term] = score

    metadata = {
        k: v for k, v in preamble.metadata.items() if k not in (KIND_KEY, CATEGORIES_KEY)
    }
    return AffectLexicon(
        kind=kind, categories=tuple(categories), entries=entries, metadata=metadata
    )


def load_affect_lexicon(
    path: str | Path, expected_kind: LexiconKind | None = None
) -> AffectLexicon:
    """Load a lexicon TSV file, checking its kind when one is expected."""
    lexicon = parse_affect_lexicon(read_lines(path), expected_kind, path=path)
    logger.info(
        "Loaded %s lexicon %s: %d categories, %d entries",
        lexicon.kind,
        path,
        len(lexicon.categories),
        len(lexicon),
    )
    return lexicon


def format_affect_lexicon(
    lexicon: AffectLexicon, provenance: Provenance | None = None
) -> list[str]:
    """Render a lexicon as TSV lines (scores with 6 decimal places)."""
    lines = [f"#{KIND_KEY}={lexicon.kind}"]
    lines.append(f"#{CATEGORIES_KEY}={' '.join(lexicon.categories)}")
    for key in sorted(lexicon.metadata):
        value = " ".join(str(lexicon.metadata[key]).split())
        lines.append(f"#{key}={value}")
    if provenance is not None:
        lines.append(provenance.comment_line())
    for category in lexicon.categories:
        for term, score in lexicon.entries.get(category, {}).items():
            lines.append(f"{category}\t{term}\t{score:.6f}")
    return lines


def save_affect_lexicon(
    lexicon: AffectLexicon, path: str | Path, provenance: Provenance | None = None
) -> None:
    write_lines(path, format_affect_lexicon(lexicon, provenance))


def load_emolex_wordlevel(path: str | Path) -> AffectLexicon:
    """Load the word-level emotion lexicon layout 'term<TAB>emotion<TAB>0|1'.

    Only the eight basic emotions are kept; the positive/negative sentiment
    rows are ignored. Categories follow the canonical emotion order.
    """
    entries: dict[str, dict[str, float]] = {e: {} for e in BASIC_EMOTIONS}
    for number, raw in enumerate(read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconFormatError(
                f"expected 3 tab-separated fields, got {len(parts)}",
                path=path,
                line=number,
            )
        term, emotion, flag = (p.strip() for p in parts)
        if flag not in ("0", "1"):
            raise LexiconFormatError(
                "binary score must be 0 or 1", path=path, line=number
            )
        if emotion in entries and flag == "1":
            entries[emotion][term] = 1.0
    return AffectLexicon(
        kind=LexiconKind.BINARY_ASSOCIATION,
        categories=BASIC_EMOTIONS,
        entries=entries,
        metadata={"source": str(path)},
    )


# Specificity (information content)


@dataclass(frozen=True)
class SynsetIC:
    synset_id: str
    pos: PartOfSpeech
    ic: float


@dataclass(frozen=True)
class SynsetICTable:
    """Synset information content plus the word -> synset index."""

    rows: Mapping[str, SynsetIC]
    word_index: Mapping[tuple[str, PartOfSpeech], frozenset[str]]

    def __post_init__(self):
        for key, synsets in self.word_index.items():
            for synset_id in synsets:
                if synset_id not in self.rows:
                    raise ValueError(f"{key[0]}/{key[1]}: unknown synset {synset_id!r}")


def load_synset_table(ic_path: str | Path, index_path: str | Path) -> SynsetICTable:
    """Load 'synset_id<TAB>pos<TAB>ic' rows and a 'term<TAB>pos<TAB>synset_id' index."""
    rows: dict[str, SynsetIC] = {}
    for number, raw in enumerate(read_lines(ic_path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconFormatError(
                f"expected 3 tab-separated fields, got {len(parts)}",
                path=ic_path,
                line=number,
            )
        synset_id, pos_text, ic_text = (p.strip() for p in parts)
        pos = PartOfSpeech.parse(pos_text)
        if pos is None:
            raise LexiconFormatError(
                "unknown part of speech", path=ic_path, line=number, detail=repr(pos_text)
            )
        ic = parse_float(ic_text, error=LexiconFormatError, path=ic_path, line=number)
        if ic < 0:
            raise LexiconFormatError(
                "information content must be non-negative", path=ic_path, line=number
            )
        if synset_id in rows:
            raise LexiconFormatError(
                "duplicate synset", path=ic_path, line=number, detail=repr(synset_id)
            )
        rows[synset_id] = SynsetIC(synset_id, pos, ic)

    index: dict[tuple[str, PartOfSpeech], set[str]] = {}
    for number, raw in enumerate(read_lines(index_path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconFormatError(
                f"expected 3 tab-separated fields, got {len(parts)}",
                path=index_path,
                line=number,
            )
        term, pos_text, synset_id = (p.strip() for p in parts)
        pos = PartOfSpeech.parse(pos_text)
        if pos is None:
            raise LexiconFormatError(
                "unknown part of speech",
                path=index_path,
                line=number,
                detail=repr(pos_text),
            )
        if synset_id not in rows:
            raise LexiconFormatError(
                "unknown synset", path=index_path, line=number, detail=repr(synset_id)
            )
        if rows[synset_id].pos != pos:
            raise LexiconFormatError(
                f"synset is a {rows[synset_id].pos}, indexed as a {pos}",
                path=index_path,
                line=number,
                detail=repr(synset_id),
            )
        index.setdefault((term, pos), set()).add(synset_id)

    logger.info("Loaded %d synsets, %d indexed words", len(rows), len(index))
    return SynsetICTable(
        rows=rows, word_index={k: frozenset(v) for k, v in index.items()}
    )


def save_synset_table(
    table: SynsetICTable,
    ic_path: str | Path,
    index_path: str | Path,
    provenance: Provenance | None = None,
) -> None:
    stamp = [provenance.comment_line()] if provenance is not None else []
    write_lines(
        ic_path,
        stamp + [f"{r.synset_id}\t{r.pos}\t{r.ic!r}" for r in table.rows.values()],
    )
    write_lines(
        index_path,
        stamp
        + [
            f"{term}\t{pos}\t{synset_id}"
            for (term, pos), synsets in sorted(table.word_index.items())
            for synset_id in sorted(synsets)
        ],
    )


def build_ic_lexicon(table: SynsetICTable) -> AffectLexicon:
    """Map each word to the highest information content among its synsets."""
    nouns: dict[str, float] = {}
    verbs: dict[str, float] = {}
    for (term, pos), synsets in sorted(table.word_index.items()):
        if not synsets:
            continue
        for s in sorted(synsets):
            if table.rows[s].pos != pos:
                raise LexiconFormatError(
                    f"synset is a {table.rows[s].pos}, indexed as a {pos}",
                    detail=f"{term}/{s}",
                )
        best = max(table.rows[s].ic for s in synsets)
        (nouns if pos == PartOfSpeech.NOUN else verbs)[term] = best
    logger.info("Built IC lexicon: %d noun, %d verb entries", len(nouns), len(verbs))
    return AffectLexicon(
        kind=LexiconKind.INFORMATION_CONTENT,
        categories=(NOUN_IC, VERB_IC),
        entries={NOUN_IC: nouns, VERB_IC: verbs},
        metadata={"source": "synset information content", "selection": "max"},
    )


def lexicon_from_scores(
    kind: LexiconKind,
    scores: Mapping[str, Mapping[str, float]],
    *,
    categories: Iterable[str] | None = None,
    metadata: Mapping[str, str] | None = None,
) -> AffectLexicon:
    """Convenience constructor; categories default to the mapping order."""
    ordered = tuple(categories) if categories is not None else tuple(scores)
    return AffectLexicon(
        kind=kind,
        categories=ordered,
        entries={c: dict(scores.get(c, {})) for c in ordered},
        metadata=dict(metadata or {}),
    )
