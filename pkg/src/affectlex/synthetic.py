"""Planted-signal corpus generator for desk-scale experiments."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path

import numpy as np

from .corpus import TRAITS, Document, LabeledTweet, Label, parse_tweet, save_essays
from .lexicon import (
    BASIC_EMOTIONS,
    OSGOOD_DIMENSIONS,
    AffectLexicon,
    LexiconKind,
    PartOfSpeech,
    SynsetIC,
    SynsetICTable,
    build_ic_lexicon,
    build_pmi_lexicon,
    count_cooccurrences,
    lexicon_from_scores,
    save_affect_lexicon,
    save_synset_table,
)
from .tabular import Provenance, write_lines, write_sidecar

logger = logging.getLogger(__name__)


MIN_DOCUMENTS = 30
MIN_CATEGORIES = 2

SIGNATURE_SIZE = 5
TWEETS_PER_CATEGORY = 50
PLANTED_PER_TRAIT = 3
DOCUMENT_LENGTH = (150, 250)
SENTENCE_LENGTH = (8, 20)
MAX_CATEGORY_RATE = 0.04
# Category words never take up more of a document than this
MAX_CATEGORY_SHARE = 0.8

CATEGORY_NAMES: tuple[str, ...] = (
    "possessive", "apart", "excited", "lonely", "proud", "nervous", "grateful",
    "bored", "jealous", "calm", "angry", "hopeful", "guilty", "curious",
    "ashamed", "relieved", "furious", "content", "anxious", "amused",
    "bitter", "cheerful", "gloomy", "inspired", "restless", "tender",
)

FILLER_WORDS: tuple[str, ...] = (
    "the", "a", "an", "and", "but", "or", "so", "of", "to", "in", "on", "at",
    "with", "for", "from", "about", "i", "me", "my", "we", "our", "you",
    "he", "she", "they", "it", "is", "was", "be", "have", "had", "do", "not",
    "no", "yes", "ok", "one", "two", "first", "time", "day", "today",
    "think", "know", "feel", "see", "hear", "friend", "people", "talk",
    "class", "work", "home", "house", "walk", "run", "go", "went", "here",
    "there", "now", "then", "because", "really", "just", "very", "thing",
    "something", "everything", "understand", "remember", "probably",
)


@dataclass(frozen=True)
class PlantedWeight:
    category: str
    weight: float


@dataclass(frozen=True)
class SyntheticParams:
    """Everything needed to regenerate a corpus and judge its separability."""

    seed: int
    n_docs: int
    n_categories: int
    signal_strength: float
    planted: Mapping[str, tuple[PlantedWeight, ...]]
    bayes_macro_f1: Mapping[str, float]
    yes_rate: Mapping[str, float]


@dataclass(frozen=True)
class SyntheticCorpus:
    documents: list[Document]
    tweet_texts: list[str]
    tweets: list[LabeledTweet]
    categories: tuple[str, ...]
    signatures: Mapping[str, tuple[str, ...]]
    hashtag_lexicon: AffectLexicon
    emolex: AffectLexicon
    osgood: AffectLexicon
    synsets: SynsetICTable
    ic_lexicon: AffectLexicon
    params: SyntheticParams


def category_names(n: int) -> tuple[str, ...]:
    names = list(CATEGORY_NAMES[:n])
    names.extend(f"emotion{i}" for i in range(len(names) + 1, n + 1))
    return tuple(names)


def _signature(category: str) -> tuple[str, ...]:
    """The category word itself plus numbered variants."""
    return (category,) + tuple(f"{category}{j}" for j in range(2, SIGNATURE_SIZE + 1))


def _sentences(words: Sequence[str], rng: np.random.Generator) -> str:
    sentences = []
    start = 0
    while start < len(words):
        size = int(rng.integers(SENTENCE_LENGTH[0], SENTENCE_LENGTH[1] + 1))
        sentences.append(" ".join(words[start : start + size]) + ".")
        start += size
    return " ".join(sentences)


def _tweets(
    categories: Sequence[str],
    signatures: Mapping[str, tuple[str, ...]],
    rng: np.random.Generator,
) -> list[str]:
    texts = []
    for category in categories:
        for _ in range(TWEETS_PER_CATEGORY):
            size = int(rng.integers(2, 5))
            picked = [signatures[category][i] for i in rng.choice(SIGNATURE_SIZE, size, replace=False)]
            filler = [FILLER_WORDS[i] for i in rng.integers(0, len(FILLER_WORDS), int(rng.integers(3, 8)))]
            words = picked + filler
            order = rng.permutation(len(words))
            texts.append(" ".join(words[i] for i in order) + f" #{category}")
    return texts


def _zscores(matrix: np.ndarray) -> np.ndarray:
    std = matrix.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    z = (matrix - matrix.mean(axis=0)) / scale
    z[:, std == 0] = 0.0
    return z


def bayes_macro_f1(probabilities: Sequence[float]) -> float:
    """Expected macro-F1 of predicting yes exactly when P(yes) >= 0.5.

    Uses expected confusion counts under the generating probabilities.
    """
    tp = fp = fn = tn = 0.0
    for p in probabilities:
        if p >= 0.5:
            tp += p
            fp += 1 - p
        else:
            fn += p
            tn += 1 - p
    f1_yes = 2 * tp / (2 * tp + fp + fn) if tp > 0 else 0.0
    f1_no = 2 * tn / (2 * tn + fn + fp) if tn > 0 else 0.0
    return (f1_yes + f1_no) / 2


def _affect_lexicons(
    categories: Sequence[str],
    signatures: Mapping[str, tuple[str, ...]],
    vocabulary: Sequence[str],
    rng: np.random.Generator,
) -> tuple[AffectLexicon, AffectLexicon, SynsetICTable]:
    basic: dict[str, dict[str, float]] = {e: {} for e in BASIC_EMOTIONS}
    for index, category in enumerate(categories):
        emotion = BASIC_EMOTIONS[index % len(BASIC_EMOTIONS)]
        basic[emotion].update((word, 1.0) for word in signatures[category])
    emolex = lexicon_from_scores(
        LexiconKind.BINARY_ASSOCIATION,
        basic,
        categories=BASIC_EMOTIONS,
        metadata={"source": "synthetic"},
    )

    osgood_scores = rng.uniform(-1.0, 1.0, size=(len(vocabulary), len(OSGOOD_DIMENSIONS)))
    osgood = lexicon_from_scores(
        LexiconKind.OSGOOD_DIMENSION,
        {
            dimension: {
                word: round(float(osgood_scores[i, d]), 3) for i, word in enumerate(vocabulary)
            }
            for d, dimension in enumerate(OSGOOD_DIMENSIONS)
        },
        categories=OSGOOD_DIMENSIONS,
        metadata={"source": "synthetic"},
    )

    rows: dict[str, SynsetIC] = {}
    index: dict[tuple[str, PartOfSpeech], frozenset[str]] = {}
    for word in vocabulary:
        pos = PartOfSpeech.NOUN if rng.random() < 0.6 else PartOfSpeech.VERB
        synsets = []
        for s in range(int(rng.integers(1, 3))):
            synset_id = f"{word}.{pos.value[0]}.{s + 1:02d}"
            rows[synset_id] = SynsetIC(synset_id, pos, round(float(rng.uniform(1.0, 12.0)), 4))
            synsets.append(synset_id)
        index[(word, pos)] = frozenset(synsets)
    return emolex, osgood, SynsetICTable(rows=rows, word_index=index)


def generate_synthetic(
    seed: int,
    n_docs: int,
    n_categories: int,
    signal_strength: float,
) -> SyntheticCorpus:
    """Generate essays whose trait labels follow planted category-word rates.

    Each trait depends on the z-scored rates of a few planted categories
    through a logistic model scaled by `signal_strength`; strength 0 makes
    every label a fair coin. A tweet corpus and its PMI lexicon are generated
    alongside, so the fine emotion features can recover the rates.
    """
    if n_docs < MIN_DOCUMENTS:
        raise ValueError(f"n_docs must be at least {MIN_DOCUMENTS}, got {n_docs}")
    if n_categories < MIN_CATEGORIES:
        raise ValueError(f"n_categories must be at least {MIN_CATEGORIES}, got {n_categories}")
    if signal_strength < 0:
        raise ValueError("signal_strength must be non-negative")

    rng = np.random.default_rng(seed)
    categories = category_names(n_categories)
    signatures = {c: _signature(c) for c in categories}

    tweet_texts = _tweets(categories, signatures, rng)
    tweets = [t for t in (parse_tweet(text, set(categories)) for text in tweet_texts) if t]
    hashtag_lexicon = build_pmi_lexicon(
        count_cooccurrences(tweets), categories=categories, source="synthetic tweets"
    )

    texts: list[str] = []
    rates = np.zeros((n_docs, n_categories))
    for d in range(n_docs):
        length = int(rng.integers(DOCUMENT_LENGTH[0], DOCUMENT_LENGTH[1] + 1))
        target = rng.uniform(0.0, MAX_CATEGORY_RATE, size=n_categories)
        if target.sum() > MAX_CATEGORY_SHARE:
            target *= MAX_CATEGORY_SHARE / target.sum()
        counts = rng.multinomial(length, np.append(target, 1.0 - target.sum()))
        words: list[str] = []
        for c, category in enumerate(categories):
            words.extend(signatures[category][i] for i in rng.integers(0, SIGNATURE_SIZE, counts[c]))
        words.extend(FILLER_WORDS[i] for i in rng.integers(0, len(FILLER_WORDS), counts[-1]))
        order = rng.permutation(len(words))
        texts.append(_sentences([words[i] for i in order], rng))
        rates[d] = counts[:-1] / length

    z = _zscores(rates)
    planted: dict[str, tuple[PlantedWeight, ...]] = {}
    probabilities: dict[str, np.ndarray] = {}
    for trait in TRAITS:
        chosen = rng.choice(n_categories, size=min(PLANTED_PER_TRAIT, n_categories), replace=False)
        signs = rng.choice([-1.0, 1.0], size=len(chosen))
        planted[trait] = tuple(
            PlantedWeight(categories[int(c)], float(s * signal_strength))
            for c, s in zip(chosen, signs)
        )
        logits = z[:, chosen] @ (signs * signal_strength)
        probabilities[trait] = 1.0 / (1.0 + np.exp(-logits))

    draws = {trait: rng.random(n_docs) for trait in TRAITS}
    documents = []
    for d, text in enumerate(texts):
        labels = {
            trait: Label.YES if draws[trait][d] < probabilities[trait][d] else Label.NO
            for trait in TRAITS
        }
        documents.append(Document.from_text(f"doc{d + 1:04d}", text, labels))

    vocabulary = sorted({w for s in signatures.values() for w in s} | set(FILLER_WORDS))
    emolex, osgood, synsets = _affect_lexicons(categories, signatures, vocabulary, rng)

    params = SyntheticParams(
        seed=seed,
        n_docs=n_docs,
        n_categories=n_categories,
        signal_strength=signal_strength,
        planted=planted,
        bayes_macro_f1={t: bayes_macro_f1(probabilities[t].tolist()) for t in TRAITS},
        yes_rate={
            t: sum(1 for doc in documents if doc.label(t) is Label.YES) / n_docs for t in TRAITS
        },
    )
    logger.info(
        "Generated %d documents over %d categories (signal %.2f)",
        n_docs,
        n_categories,
        signal_strength,
    )
    return SyntheticCorpus(
        documents=documents,
        tweet_texts=tweet_texts,
        tweets=tweets,
        categories=categories,
        signatures=signatures,
        hashtag_lexicon=hashtag_lexicon,
        emolex=emolex,
        osgood=osgood,
        synsets=synsets,
        ic_lexicon=build_ic_lexicon(synsets),
        params=params,
    )


def _toml_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_generator_params(params: SyntheticParams, provenance: Provenance | None = None) -> list[str]:
    """Generator parameters as a TOML document."""
    lines = []
    if provenance is not None:
        lines.append(provenance.comment_line())
    lines += [
        "[generator]",
        f"seed = {params.seed}",
        f"n_docs = {params.n_docs}",
        f"n_categories = {params.n_categories}",
        f"signal_strength = {_toml_value(float(params.signal_strength))}",
    ]
    for trait in TRAITS:
        weights = params.planted[trait]
        lines += [
            "",
            f"[planted.{trait}]",
            f"categories = {_toml_value([w.category for w in weights])}",
            f"weights = {_toml_value([w.weight for w in weights])}",
            f"bayes_macro_f1 = {_toml_value(params.bayes_macro_f1[trait])}",
            f"yes_rate = {_toml_value(params.yes_rate[trait])}",
        ]
    return lines


# File names written by `write_synthetic`, keyed by role
SYNTHETIC_FILES: dict[str, str] = {
    "essays": "essays.csv",
    "tweets": "tweets.txt",
    "inventory": "inventory.txt",
    "hashtag": "hashtag.tsv",
    "emolex": "emolex.tsv",
    "osgood": "osgood.tsv",
    "ic": "ic.tsv",
    "synsets": "synsets.tsv",
    "synset_index": "synset_index.tsv",
    "categories": "categories.cats",
    "generator": "generator.toml",
}


def write_synthetic(
    corpus: SyntheticCorpus, out_dir: str | Path, provenance: Provenance | None = None
) -> dict[str, Path]:
    """Write the corpus, its lexicons and the generator parameters."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {role: out / name for role, name in SYNTHETIC_FILES.items()}

    stamp = [provenance.comment_line()] if provenance is not None else []
    save_essays(corpus.documents, paths["essays"])
    if provenance is not None:
        paths["essays_provenance"] = write_sidecar(paths["essays"], provenance)
    write_lines(paths["tweets"], stamp + list(corpus.tweet_texts))
    write_lines(paths["inventory"], stamp + [f"#{c}" for c in corpus.categories])
    save_affect_lexicon(corpus.hashtag_lexicon, paths["hashtag"], provenance)
    save_affect_lexicon(corpus.emolex, paths["emolex"], provenance)
    save_affect_lexicon(corpus.osgood, paths["osgood"], provenance)
    save_affect_lexicon(corpus.ic_lexicon, paths["ic"], provenance)
    save_synset_table(corpus.synsets, paths["synsets"], paths["synset_index"], provenance)
    categories = (
        importlib_resources.files("affectlex")
        .joinpath("data/mairesse_open.cats")
        .read_text(encoding="utf-8")
    )
    write_lines(paths["categories"], stamp + categories.splitlines())
    write_lines(paths["generator"], format_generator_params(corpus.params, provenance))
    logger.info("Wrote synthetic corpus to %s", out)
    return paths
