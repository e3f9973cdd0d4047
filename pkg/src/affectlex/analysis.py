"""Information-gain feature ranking and top-term listings."""

from __future__ import annotations

import logging
import math
from collections.abc import Collection, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .corpus import Label
from .errors import EvaluationError
from .features import NAME_SEPARATOR, FeatureMatrix, FeatureSource
from .lexicon import AffectLexicon
from .tabular import Provenance, format_float

logger = logging.getLogger(__name__)


DEFAULT_TOP_K = 10
DEFAULT_TOP_TERMS = 5

# Conditional entropies this close count as equal; the smaller threshold wins
GAIN_TIE_TOLERANCE = 1e-12


def entropy(yes: int, no: int) -> float:
    """Binary entropy in bits of a yes/no count pair."""
    total = yes + no
    result = 0.0
    for count in (yes, no):
        if count:
            p = count / total
            result -= p * math.log2(p)
    return result


def information_gain(values: Sequence[float], labels: Sequence[Label]) -> tuple[float, float]:
    """Best single-threshold gain of a feature, and the threshold.

    Candidate thresholds are midpoints between consecutive distinct values;
    values <= threshold go left. A constant feature has gain 0 at the
    constant itself.
    """
    if len(values) != len(labels):
        raise EvaluationError(f"{len(values)} values but {len(labels)} labels")
    if len(values) < 2:
        raise EvaluationError("information gain needs at least two instances")

    pairs = sorted(zip((float(v) for v in values), (Label(l) for l in labels)))
    total_yes = sum(1 for _, label in pairs if label is Label.YES)
    total_no = len(pairs) - total_yes
    n = len(pairs)
    prior = entropy(total_yes, total_no)

    candidates: list[tuple[float, float]] = []
    left_yes = left_no = 0
    for i in range(n - 1):
        value, label = pairs[i]
        if label is Label.YES:
            left_yes += 1
        else:
            left_no += 1
        following = pairs[i + 1][0]
        if following == value:
            continue
        left = left_yes + left_no
        conditional = (left / n) * entropy(left_yes, left_no) + ((n - left) / n) * entropy(
            total_yes - left_yes, total_no - left_no
        )
        candidates.append(((value + following) / 2, conditional))

    if not candidates:
        return 0.0, pairs[0][0]
    best = min(c for _, c in candidates)
    threshold, conditional = next(
        (t, c) for t, c in candidates if c <= best + GAIN_TIE_TOLERANCE
    )
    return max(0.0, prior - conditional), threshold


@dataclass(frozen=True)
class RankedFeature:
    name: str
    gain: float
    threshold: float

    @property
    def short_name(self) -> str:
        """Name without its family prefix ('fine_emo:joy' -> 'joy')."""
        return self.name.partition(NAME_SEPARATOR)[2] or self.name


@dataclass(frozen=True)
class GainRanking:
    """Features of one trait ordered by information gain."""

    trait: str
    features: tuple[RankedFeature, ...]

    def __post_init__(self):
        keys = [(-f.gain, f.name) for f in self.features]
        if keys != sorted(keys):
            raise ValueError("ranking must be sorted by gain, then name")

    def __len__(self) -> int:
        return len(self.features)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]


def rank_features(
    matrix: FeatureMatrix,
    labels: Sequence[Label],
    trait: str,
    top_k: int | None = DEFAULT_TOP_K,
    *,
    sources: Collection[FeatureSource] | None = None,
    jobs: int = 1,
) -> GainRanking:
    """Rank matrix columns by information gain with respect to a trait.

    `top_k` larger than the number of columns returns every column.
    """
    if len(labels) != len(matrix):
        raise EvaluationError(f"{len(matrix)} rows but {len(labels)} labels")
    if top_k is not None and top_k < 1:
        raise EvaluationError(f"top_k must be positive, got {top_k}")
    columns = [
        (index, name)
        for index, (name, source) in enumerate(matrix.schema.features)
        if sources is None or source in sources
    ]

    def score(column: tuple[int, str]) -> RankedFeature:
        index, name = column
        gain, threshold = information_gain(matrix.values[:, index].tolist(), labels)
        return RankedFeature(name, gain, threshold)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            ranked = list(pool.map(score, columns))
    else:
        ranked = [score(c) for c in columns]
    ranked.sort(key=lambda f: (-f.gain, f.name))
    if top_k is not None:
        ranked = ranked[:top_k]
    logger.info("Ranked %d features for %s", len(columns), trait)
    return GainRanking(trait, tuple(ranked))


def top_terms(lex: AffectLexicon, category: str, n: int = DEFAULT_TOP_TERMS) -> list[tuple[str, float]]:
    """The n highest-scoring terms of a category; ties by term."""
    scores = lex.category(category)
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return ordered[:n]


# Output


def format_ranking(ranking: GainRanking, provenance: Provenance | None = None) -> list[str]:
    lines = []
    if provenance is not None:
        lines.append(provenance.comment_line())
    lines.append("trait\trank\tfeature\tgain\tthreshold")
    for rank, feature in enumerate(ranking.features, start=1):
        lines.append(
            f"{ranking.trait}\t{rank}\t{feature.name}\t"
            f"{format_float(feature.gain)}\t{format_float(feature.threshold)}"
        )
    return lines


def format_ranking_table(rankings: Sequence[GainRanking]) -> list[str]:
    """Side-by-side top features, one column per trait."""
    if not rankings:
        return []
    depth = max(len(r) for r in rankings)
    columns = [
        [r.trait] + [f.short_name for f in r.features] + [""] * (depth - len(r))
        for r in rankings
    ]
    widths = [max(len(cell) for cell in column) for column in columns]
    lines = []
    for row in range(depth + 1):
        label = "" if row == 0 else f"{row}."
        cells = [f"{column[row]:<{width}}" for column, width in zip(columns, widths)]
        lines.append(f"{label:<4}" + "  ".join(cells).rstrip())
    return lines


def format_top_terms(category: str, terms: Sequence[tuple[str, float]]) -> str:
    """Render as '#apart: 1. apart: 4.6  2. tear: 4.065 ...'."""
    listing = "  ".join(
        f"{rank}. {term}: {score:g}" for rank, (term, score) in enumerate(terms, start=1)
    )
    return f"#{category}: {listing}".rstrip()
