"""Stratified cross-validation, macro-F1, repeated runs and paired t-tests."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from sklearn.metrics import f1_score

from .audit import LeakAudit, auditing
from .corpus import TRAITS, Document, Label
from .errors import EvaluationError
from .features import (
    FeatureConfig,
    FeatureExtractor,
    FeatureMatrix,
    FeatureResources,
    FeatureSchema,
    FeatureSource,
    build_vocabulary,
)
from .learner import SvmParams, train_majority, train_svm
from .tabular import Provenance, format_float

logger = logging.getLogger(__name__)


DEFAULT_K = 3
DEFAULT_REPETITIONS = 10
SIGNIFICANCE_LEVEL = 0.01

MAJORITY_NAME = "majority"
MAJORITY_LABEL = "Majority Classifier"


# Folds


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every document to one of k test folds."""

    k: int
    assignments: Mapping[str, int]
    seed: int

    def __post_init__(self):
        if self.k < 2:
            raise EvaluationError(f"k must be at least 2, got {self.k}")

    def test_ids(self, fold: int) -> list[str]:
        return [doc_id for doc_id, f in self.assignments.items() if f == fold]

    def split(self, ids: Sequence[str], fold: int) -> tuple[list[int], list[int]]:
        """Positions of training and test documents for one fold."""
        train: list[int] = []
        test: list[int] = []
        for position, doc_id in enumerate(ids):
            (test if self.assignments[doc_id] == fold else train).append(position)
        return train, test


def stratified_folds(
    labels: Sequence[Label],
    k: int = DEFAULT_K,
    seed: int = 0,
    *,
    ids: Sequence[str] | None = None,
) -> FoldPlan:
    """Shuffle each class by seed and deal it round-robin to k folds.

    Dealing continues where the previous class stopped, so fold sizes stay
    within one of each other overall as well as per class.
    """
    if ids is None:
        ids = [str(i) for i in range(len(labels))]
    if len(ids) != len(labels):
        raise EvaluationError(f"{len(ids)} ids but {len(labels)} labels")
    if k < 2:
        raise EvaluationError(f"k must be at least 2, got {k}")

    rng = np.random.default_rng(seed)
    assignments: dict[str, int] = {}
    offset = 0
    for label in (Label.YES, Label.NO):
        members = [i for i, lab in enumerate(labels) if Label(lab) is label]
        if len(members) < k:
            raise EvaluationError(
                f"class '{label}' has {len(members)} member(s), fewer than k={k}"
            )
        for position, index in enumerate(rng.permutation(members)):
            assignments[ids[int(index)]] = (offset + position) % k
        offset = (offset + len(members)) % k
    ordered = {doc_id: assignments[doc_id] for doc_id in ids}
    return FoldPlan(k=k, assignments=ordered, seed=seed)


# Scores and statistics


def macro_f1(gold: Sequence[Label], pred: Sequence[Label]) -> float:
    """Unweighted mean of the yes and no F1 scores; a class with no true positives scores 0."""
    if len(gold) != len(pred):
        raise EvaluationError(f"{len(gold)} gold labels but {len(pred)} predictions")
    if not gold:
        raise EvaluationError("no labels to score")
    return float(
        f1_score(
            [Label(g).value for g in gold],
            [Label(p).value for p in pred],
            labels=[Label.YES.value, Label.NO.value],
            average="macro",
            zero_division=0,
        )
    )


_FPMIN = 1e-300
_CF_EPSILON = 3e-16
_CF_MAX_TERMS = 500


def _beta_continued_fraction(x: float, a: float, b: float) -> float:
    """Modified Lentz evaluation of the incomplete beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_TERMS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPSILON:
            break
    return h


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) for 0 <= x <= 1 and a, b > 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    # The fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_continued_fraction(x, a, b) / a
    return 1.0 - math.exp(log_front) * _beta_continued_fraction(1.0 - x, b, a) / b


def t_two_sided_p(t: float, df: int) -> float:
    """Two-sided p-value of a t statistic with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be at least 1, got {df}")
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)


def t_cdf(t: float, df: int) -> float:
    tail = t_two_sided_p(t, df) / 2.0
    return 1.0 - tail if t > 0 else tail


@dataclass(frozen=True)
class SignificanceResult:
    trait: str
    mean_difference: float
    t: float
    df: int
    p: float
    significant_at_99: bool


def paired_t_test(
    baseline: Sequence[float], other: Sequence[float], *, trait: str = ""
) -> SignificanceResult:
    """Paired t-test on other - baseline.

    Constant differences have no t statistic; they get p = 1 when the
    difference is zero and p = 0 otherwise.
    """
    if len(baseline) != len(other):
        raise EvaluationError(
            f"paired samples differ in length: {len(baseline)} vs {len(other)}"
        )
    n = len(baseline)
    if n < 2:
        raise EvaluationError("a paired t-test needs at least two repetitions")
    differences = [b - a for a, b in zip(baseline, other)]
    df = n - 1
    if min(differences) == max(differences):
        mean = differences[0]
        if mean == 0.0:
            t, p = 0.0, 1.0
        else:
            t, p = math.copysign(math.inf, mean), 0.0
    else:
        mean = math.fsum(differences) / n
        variance = math.fsum((d - mean) ** 2 for d in differences) / (n - 1)
        t = mean * math.sqrt(n) / math.sqrt(variance)
        p = t_two_sided_p(t, df)
    return SignificanceResult(
        trait=trait,
        mean_difference=mean,
        t=t,
        df=df,
        p=p,
        significant_at_99=p < SIGNIFICANCE_LEVEL,
    )


# Experiment configuration


class LearnerKind(StrEnum):
    SVM = "svm"
    MAJORITY = "majority"


@dataclass(frozen=True)
class LearnerConfig:
    kind: LearnerKind = LearnerKind.SVM
    params: SvmParams = SvmParams()


@dataclass(frozen=True)
class Configuration:
    """A named feature configuration, one row of the results table."""

    name: str
    label: str = ""
    features: FeatureConfig | None = None
    learner: LearnerConfig = LearnerConfig()

    def __post_init__(self):
        if self.learner.kind == LearnerKind.SVM and self.features is None:
            raise EvaluationError(f"configuration {self.name!r} has no feature sets")

    @classmethod
    def majority(cls) -> Configuration:
        return cls(MAJORITY_NAME, MAJORITY_LABEL, None, LearnerConfig(LearnerKind.MAJORITY))

    @property
    def title(self) -> str:
        if self.name == MAJORITY_NAME or not self.label:
            return self.label or self.name
        return f"{self.name}. {self.label}"

    def describe(self) -> dict[str, object]:
        return {
            "name": self.name,
            "label": self.label,
            "learner": str(self.learner.kind),
            "features": self.features.describe() if self.features else None,
        }


# Cross-validation


@dataclass(frozen=True)
class FoldScores:
    """Per-fold macro-F1 of one trait under one fold plan."""

    trait: str
    seed: int
    scores: tuple[float, ...]

    @property
    def mean(self) -> float:
        return math.fsum(self.scores) / len(self.scores)


class PreparedFeatures:
    """Vocabulary-independent feature blocks, computed once per configuration.

    These families are per-document functions of fixed lexicons, so computing
    them for all documents up front reads no label or fold statistics.
    """

    def __init__(
        self,
        docs: Sequence[Document],
        config: FeatureConfig,
        resources: FeatureResources,
        *,
        jobs: int = 1,
    ):
        self.docs = list(docs)
        self.ids = [d.id for d in docs]
        self.config = config
        self.extractor = FeatureExtractor(config, resources)
        self.static = self.extractor.static_blocks(self.docs, jobs=jobs)

    def fold_matrices(
        self, train: Sequence[int], test: Sequence[int]
    ) -> tuple[FeatureMatrix, FeatureMatrix]:
        blocks: dict[FeatureSource, tuple[FeatureSchema, np.ndarray]] = dict(self.static)
        if self.config.uses_unigrams:
            vocabulary = build_vocabulary(
                [self.docs[i] for i in train], min_count=self.config.unigram_min_count
            )
            blocks[FeatureSource.UNIGRAM] = self.extractor.family_block(
                FeatureSource.UNIGRAM, self.docs, vocabulary
            )
        matrix = self.extractor.compose(self.ids, blocks)
        return matrix.select_rows(train), matrix.select_rows(test)


def _score_fold(
    configuration: Configuration,
    train_matrix: FeatureMatrix | None,
    test_matrix: FeatureMatrix | None,
    train_labels: list[Label],
    test_labels: list[Label],
    *,
    trait: str,
    seed: int,
) -> float:
    learner = configuration.learner
    if learner.kind == LearnerKind.MAJORITY:
        model = train_majority(train_labels, trait=trait)
        predictions = [model.label] * len(test_labels)
    else:
        assert train_matrix is not None and test_matrix is not None
        params = learner.params
        svm = train_svm(
            train_matrix,
            train_labels,
            params.C,
            seed,
            trait=trait,
            epochs=params.epochs,
            solver=params.solver,
            tolerance=params.tolerance,
        )
        predictions = [p.label for p in svm.predict_many(test_matrix)]
    return macro_f1(test_labels, predictions)


def cross_validate(
    docs: Sequence[Document],
    configuration: Configuration,
    k: int = DEFAULT_K,
    seed: int = 0,
    *,
    trait: str,
    resources: FeatureResources | None = None,
    prepared: PreparedFeatures | None = None,
    audit: LeakAudit | None = None,
) -> FoldScores:
    """Macro-F1 of each of k stratified folds for one trait.

    Vocabulary and scaling are fit on the training folds only.
    """
    labels = [d.label(trait) for d in docs]
    ids = [d.id for d in docs]
    plan = stratified_folds(labels, k, seed, ids=ids)

    if configuration.features is not None and prepared is None:
        if resources is None:
            raise EvaluationError(
                f"configuration {configuration.name!r} needs feature resources"
            )
        prepared = PreparedFeatures(docs, configuration.features, resources)

    scores = []
    for fold in range(k):
        train, test = plan.split(ids, fold)
        key = (trait, seed, fold)
        if audit is not None:
            audit.record_test(*key, [ids[i] for i in test])
        with auditing(audit, key):
            train_matrix = test_matrix = None
            if prepared is not None and configuration.learner.kind == LearnerKind.SVM:
                train_matrix, test_matrix = prepared.fold_matrices(train, test)
            score = _score_fold(
                configuration,
                train_matrix,
                test_matrix,
                [labels[i] for i in train],
                [labels[i] for i in test],
                trait=trait,
                seed=seed,
            )
        logger.debug(
            "%s %s seed %d fold %d: macro-F1 %.4f", configuration.name, trait, seed, fold, score
        )
        scores.append(score)
    return FoldScores(trait=trait, seed=seed, scores=tuple(scores))


@dataclass(frozen=True)
class EvalReport:
    """Per-trait fold scores of one configuration over all repetitions."""

    configuration: Configuration
    seeds: tuple[int, ...]
    k: int
    scores: Mapping[str, tuple[FoldScores, ...]]

    def __post_init__(self):
        for trait, runs in self.scores.items():
            for run in runs:
                if not all(0.0 <= s <= 1.0 for s in run.scores):
                    raise ValueError(f"{trait}: macro-F1 outside [0, 1]")

    @property
    def traits(self) -> tuple[str, ...]:
        return tuple(self.scores)

    def repetition_means(self, trait: str) -> list[float]:
        return [run.mean for run in self.scores[trait]]

    def mean(self, trait: str) -> float:
        means = self.repetition_means(trait)
        return math.fsum(means) / len(means)


def default_seeds(repetitions: int, start: int = 1) -> tuple[int, ...]:
    return tuple(range(start, start + repetitions))


def run_repetitions(
    docs: Sequence[Document],
    configuration: Configuration,
    *,
    seeds: Sequence[int],
    k: int = DEFAULT_K,
    traits: Sequence[str] = TRAITS,
    resources: FeatureResources | None = None,
    jobs: int = 1,
    audit: LeakAudit | None = None,
) -> EvalReport:
    """Cross-validate every trait once per seed.

    Repetition r shuffles folds with seeds[r], so two configurations run
    with the same seeds see identical fold plans.
    """
    if not seeds:
        raise EvaluationError("no seeds")
    prepared = None
    if configuration.features is not None:
        if resources is None:
            raise EvaluationError(
                f"configuration {configuration.name!r} needs feature resources"
            )
        prepared = PreparedFeatures(docs, configuration.features, resources, jobs=jobs)

    tasks = [(trait, seed) for trait in traits for seed in seeds]

    def run(task: tuple[str, int]) -> FoldScores:
        trait, seed = task
        return cross_validate(
            docs,
            configuration,
            k,
            seed,
            trait=trait,
            prepared=prepared,
            audit=audit,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = dict(zip(tasks, pool.map(run, tasks)))
    else:
        results = {task: run(task) for task in tasks}

    scores = {trait: tuple(results[(trait, seed)] for seed in seeds) for trait in traits}
    report = EvalReport(configuration=configuration, seeds=tuple(seeds), k=k, scores=scores)
    for trait in traits:
        logger.info(
            "%s %s: mean macro-F1 %.4f over %d repetitions",
            configuration.name,
            trait,
            report.mean(trait),
            len(seeds),
        )
    return report


def compare_reports(
    baseline: EvalReport, other: EvalReport
) -> dict[str, SignificanceResult]:
    """Paired t-test of each trait's per-repetition means, other vs baseline."""
    if baseline.seeds != other.seeds or baseline.k != other.k:
        raise EvaluationError(
            f"reports for {baseline.configuration.name!r} and "
            f"{other.configuration.name!r} were not run on the same folds"
        )
    return {
        trait: paired_t_test(
            baseline.repetition_means(trait), other.repetition_means(trait), trait=trait
        )
        for trait in other.traits
        if trait in baseline.scores
    }


def repeat_and_test(
    docs: Sequence[Document],
    config_a: Configuration,
    config_b: Configuration,
    *,
    repetitions: int = DEFAULT_REPETITIONS,
    seeds: Sequence[int] | None = None,
    k: int = DEFAULT_K,
    traits: Sequence[str] = TRAITS,
    resources: FeatureResources | None = None,
    jobs: int = 1,
) -> dict[str, SignificanceResult]:
    """Run both configurations on the same seeded folds and t-test B against A."""
    if repetitions < 2:
        raise EvaluationError(f"need at least 2 repetitions, got {repetitions}")
    if seeds is None:
        seeds = default_seeds(repetitions)
    if len(seeds) != repetitions:
        raise EvaluationError(
            f"{len(seeds)} seed(s) given for {repetitions} repetitions"
        )
    common = dict(seeds=seeds, k=k, traits=traits, resources=resources, jobs=jobs)
    report_a = run_repetitions(docs, config_a, **common)
    report_b = run_repetitions(docs, config_b, **common)
    return compare_reports(report_a, report_b)


# Reports


REPORT_COLUMNS = (
    "trait",
    "configuration",
    "mean_macro_f1",
    "repetition_means",
    "t",
    "df",
    "p",
    "significant",
)

MISSING = "-"


def format_report(
    reports: Sequence[EvalReport],
    tests: Mapping[str, Mapping[str, SignificanceResult]],
    provenance: Provenance | None = None,
) -> list[str]:
    """Tab-separated report, one row per (trait, configuration)."""
    lines = []
    if provenance is not None:
        lines.append(provenance.comment_line())
    lines.append("\t".join(REPORT_COLUMNS))
    traits = reports[0].traits if reports else ()
    for trait in traits:
        for report in reports:
            name = report.configuration.name
            result = tests.get(name, {}).get(trait)
            row = [
                trait,
                name,
                format_float(report.mean(trait)),
                ",".join(format_float(m) for m in report.repetition_means(trait)),
            ]
            if result is None:
                row += [MISSING] * 4
            else:
                row += [
                    format_float(result.t),
                    str(result.df),
                    format_float(result.p),
                    "yes" if result.significant_at_99 else "no",
                ]
            lines.append("\t".join(row))
    return lines


def format_summary_table(
    reports: Sequence[EvalReport],
    tests: Mapping[str, Mapping[str, SignificanceResult]],
) -> list[str]:
    """Configurations as rows, traits as columns, macro-F1 in percent.

    '*' marks an improvement over the baseline configuration that is
    significant at the 99% level.
    """
    if not reports:
        return []
    traits = reports[0].traits
    titles = [r.configuration.title for r in reports]
    width = max(len("Features"), *(len(t) for t in titles))
    lines = [f"{'Features':<{width}}  " + "  ".join(f"{t:>7}" for t in traits)]
    for title, report in zip(titles, reports):
        cells = []
        for trait in traits:
            result = tests.get(report.configuration.name, {}).get(trait)
            mark = "*" if result and result.significant_at_99 and result.mean_difference > 0 else " "
            cells.append(f"{100 * report.mean(trait):6.2f}{mark}")
        lines.append(f"{title:<{width}}  " + "  ".join(cells))
    return lines