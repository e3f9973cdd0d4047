"""Experiment configuration files."""

from __future__ import annotations

import logging
import os
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any

from .corpus import TRAITS, EssayFormat
from .errors import ConfigError, FeatureConfigError
from .evaluation import (
    DEFAULT_K,
    DEFAULT_REPETITIONS,
    MAJORITY_NAME,
    Configuration,
    LearnerConfig,
    LearnerKind,
    default_seeds,
)
from .features import (
    AicDenominator,
    AicMode,
    FeatureConfig,
    FeatureResources,
    FeatureSource,
    default_category_set,
    load_category_set,
    load_liwc_dictionary,
)
from .learner import DEFAULT_C, DEFAULT_EPOCHS, Solver, SvmParams
from .lexicon import OSGOOD_DIMENSIONS, LexiconKind, load_affect_lexicon
from .tabular import Provenance, config_hash

logger = logging.getLogger(__name__)


SEED_ENV = "AFFECTLEX_SEED"

# Table rows name feature sets by letter
SET_LETTERS: dict[str, FeatureSource] = {
    "a": FeatureSource.BASELINE,
    "b": FeatureSource.UNIGRAM,
    "c": FeatureSource.AIC,
    "d": FeatureSource.COARSE_AFF,
    "e": FeatureSource.BASIC_EMO,
    "f": FeatureSource.FINE_EMO,
}

# [lexicons] key each feature set reads; the baseline falls back to the
# shipped category lists
LEXICON_KEYS: dict[FeatureSource, str] = {
    FeatureSource.AIC: "ic",
    FeatureSource.COARSE_AFF: "osgood",
    FeatureSource.BASIC_EMO: "emolex",
    FeatureSource.FINE_EMO: "hashtag",
    FeatureSource.BASELINE: "categories",
}

ESSAY_FORMATS = {"default": EssayFormat(), "mypersonality": EssayFormat.mypersonality()}


def parse_feature_set(name: str) -> FeatureSource:
    key = name.strip().lower()
    if key in SET_LETTERS:
        return SET_LETTERS[key]
    try:
        return FeatureSource(key)
    except ValueError:
        raise ConfigError("unknown feature set", detail=repr(name)) from None


@dataclass(frozen=True)
class LexiconPaths:
    hashtag: Path | None = None
    emolex: Path | None = None
    osgood: Path | None = None
    ic: Path | None = None
    categories: Path | None = None

    def get(self, key: str) -> Path | None:
        return getattr(self, key)


@dataclass(frozen=True)
class ExperimentConfig:
    """A batch of configurations evaluated on one essay dataset."""

    dataset: Path
    output: Path
    configurations: tuple[Configuration, ...]
    lexicons: LexiconPaths = LexiconPaths()
    k: int = DEFAULT_K
    repetitions: int = DEFAULT_REPETITIONS
    seeds: tuple[int, ...] = ()
    C: float = DEFAULT_C
    epochs: int = DEFAULT_EPOCHS
    solver: Solver = Solver.SMO
    jobs: int = 1
    baseline: str | None = None
    majority: bool = True
    traits: tuple[str, ...] = TRAITS
    essay_format: str = "default"
    # Values as written in the file, for hashing
    raw: Mapping[str, Any] = dataclass_field(default_factory=dict, compare=False)

    @classmethod
    def from_toml(
        cls, path: str | Path, *, environ: Mapping[str, str] | None = None
    ) -> ExperimentConfig:
        path = Path(path)
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError("invalid TOML", path=path, detail=str(e)) from None
        return cls.from_mapping(data, base_dir=path.parent, path=path, environ=environ)

    @classmethod
    def from_mapping(
        cls,
        data: Mapping[str, Any],
        *,
        base_dir: Path = Path("."),
        path: str | Path | None = None,
        environ: Mapping[str, str] | None = None,
    ) -> ExperimentConfig:
        """Build and validate a config from parsed TOML tables.

        Relative paths resolve against `base_dir`.
        """
        environ = os.environ if environ is None else environ
        experiment = _table(data, "experiment", path)
        lexicon_table = data.get("lexicons", {})

        def resolve(value: Any, key: str) -> Path:
            if not isinstance(value, str) or not value:
                raise ConfigError(f"'{key}' must be a non-empty string", path=path)
            candidate = Path(value)
            return candidate if candidate.is_absolute() else base_dir / candidate

        if "dataset" not in experiment:
            raise ConfigError("missing 'dataset' in [experiment]", path=path)
        dataset = resolve(experiment["dataset"], "dataset")
        output = resolve(experiment.get("output", "out"), "output")

        lexicons = LexiconPaths(
            **{
                key: resolve(lexicon_table[key], f"lexicons.{key}")
                for key in ("hashtag", "emolex", "osgood", "ic", "categories")
                if key in lexicon_table
            }
        )
        unknown = set(lexicon_table) - {"hashtag", "emolex", "osgood", "ic", "categories"}
        if unknown:
            raise ConfigError(
                "unknown key in [lexicons]", path=path, detail=", ".join(sorted(unknown))
            )

        try:
            k = int(experiment.get("k", DEFAULT_K))
            repetitions = int(experiment.get("repetitions", DEFAULT_REPETITIONS))
            C = float(experiment.get("C", DEFAULT_C))
            epochs = int(experiment.get("epochs", DEFAULT_EPOCHS))
            jobs = int(experiment.get("jobs", 1))
            solver = Solver(experiment.get("solver", Solver.SMO))
        except (TypeError, ValueError) as e:
            raise ConfigError("invalid value in [experiment]", path=path, detail=str(e)) from None

        if k < 2:
            raise ConfigError(f"k must be at least 2, got {k}", path=path)
        if repetitions < 2:
            raise ConfigError(f"repetitions must be at least 2, got {repetitions}", path=path)
        if not C > 0:
            raise ConfigError(f"C must be positive, got {C}", path=path)
        if jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {jobs}", path=path)

        seeds = _seeds(experiment, repetitions, environ, path)
        params = SvmParams(C=C, epochs=epochs, solver=solver)

        configurations = tuple(
            _configuration(entry, params, path) for entry in data.get("configuration", [])
        )
        if not configurations:
            raise ConfigError("no [[configuration]] tables", path=path)
        names = [c.name for c in configurations]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ConfigError(
                "duplicate configuration name", path=path, detail=", ".join(duplicates)
            )

        baseline = experiment.get("baseline")
        majority = bool(experiment.get("majority", True))
        known = names + [MAJORITY_NAME] if majority else names
        if baseline is not None and baseline not in known:
            raise ConfigError(
                "baseline names no configuration", path=path, detail=repr(baseline)
            )

        traits = tuple(experiment.get("traits", TRAITS))
        bad_traits = [t for t in traits if t not in TRAITS]
        if bad_traits:
            raise ConfigError("unknown trait", path=path, detail=", ".join(bad_traits))

        essay_format = experiment.get("essay_format", "default")
        if essay_format not in ESSAY_FORMATS:
            raise ConfigError("unknown essay_format", path=path, detail=repr(essay_format))

        config = cls(
            dataset=dataset,
            output=output,
            configurations=configurations,
            lexicons=lexicons,
            k=k,
            repetitions=repetitions,
            seeds=seeds,
            C=C,
            epochs=epochs,
            solver=solver,
            jobs=jobs,
            baseline=baseline,
            majority=majority,
            traits=traits,
            essay_format=essay_format,
            raw=dict(data),
        )
        config.check_lexicons(path=path)
        return config

    def check_lexicons(self, *, path: str | Path | None = None) -> None:
        """Every enabled feature set has a lexicon path."""
        for configuration in self.configurations:
            if configuration.features is None:
                continue
            for source in configuration.features.sets:
                key = LEXICON_KEYS.get(source)
                if key is None or key == "categories":
                    continue
                if self.lexicons.get(key) is None:
                    raise ConfigError(
                        f"feature set '{source}' in configuration "
                        f"'{configuration.name}' needs [lexicons] {key}",
                        path=path,
                    )

    @property
    def enabled_sets(self) -> set[FeatureSource]:
        return {
            s
            for c in self.configurations
            if c.features is not None
            for s in c.features.sets
        }

    @property
    def format(self) -> EssayFormat:
        return ESSAY_FORMATS[self.essay_format]

    def describe(self) -> dict[str, Any]:
        """Resolved settings that determine the results."""
        return {
            "dataset": str(self.raw.get("experiment", {}).get("dataset", self.dataset)),
            "lexicons": {k: str(v) for k, v in sorted(self.raw.get("lexicons", {}).items())},
            "k": self.k,
            "repetitions": self.repetitions,
            "seeds": list(self.seeds),
            "C": self.C,
            "epochs": self.epochs,
            "solver": str(self.solver),
            "baseline": self.baseline,
            "majority": self.majority,
            "traits": list(self.traits),
            "essay_format": self.essay_format,
            "configurations": [c.describe() for c in self.configurations],
        }

    @property
    def hash(self) -> str:
        return config_hash(self.describe())

    @property
    def provenance(self) -> Provenance:
        return Provenance(self.hash, self.seeds)


def _table(data: Mapping[str, Any], key: str, path: str | Path | None) -> Mapping[str, Any]:
    table = data.get(key)
    if not isinstance(table, Mapping):
        raise ConfigError(f"missing [{key}] table", path=path)
    return table


def _seeds(
    experiment: Mapping[str, Any],
    repetitions: int,
    environ: Mapping[str, str],
    path: str | Path | None,
) -> tuple[int, ...]:
    override = environ.get(SEED_ENV)
    if override:
        try:
            start = int(override)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer", detail=repr(override)) from None
        logger.info("Seeds overridden by %s=%d", SEED_ENV, start)
        return default_seeds(repetitions, start)
    if "seeds" not in experiment:
        return default_seeds(repetitions)
    seeds = experiment["seeds"]
    if not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds):
        raise ConfigError("seeds must be a list of integers", path=path)
    if len(seeds) != repetitions:
        raise ConfigError(
            f"{len(seeds)} seed(s) given for {repetitions} repetitions", path=path
        )
    return tuple(seeds)


def _configuration(
    entry: Mapping[str, Any], params: SvmParams, path: str | Path | None
) -> Configuration:
    name = entry.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("[[configuration]] needs a name", path=path)
    sets = entry.get("sets", [])
    if not sets:
        raise ConfigError(
            "no feature sets enabled", path=path, detail=f"configuration {name!r}"
        )
    dimensions = tuple(entry.get("osgood_dimensions", OSGOOD_DIMENSIONS))
    unknown = [d for d in dimensions if d not in OSGOOD_DIMENSIONS]
    if unknown or not dimensions:
        raise ConfigError(
            "unknown osgood_dimensions", path=path, detail=", ".join(unknown) or "none"
        )
    try:
        features = FeatureConfig(
            sets=tuple(parse_feature_set(s) for s in sets),
            osgood_dimensions=dimensions,
            aic_mode=AicMode(entry.get("aic_mode", AicMode.BOTH)),
            aic_denominator=AicDenominator(entry.get("aic_denominator", AicDenominator.MATCHED)),
            unigram_min_count=int(entry.get("unigram_min_count", 1)),
        )
    except ValueError as e:
        raise ConfigError(
            "invalid configuration", path=path, detail=f"{name!r}: {e}"
        ) from None
    return Configuration(
        name=name,
        label=str(entry.get("label", "")),
        features=features,
        learner=LearnerConfig(LearnerKind.SVM, params),
    )


_LEXICON_KINDS: dict[str, LexiconKind] = {
    "hashtag": LexiconKind.PMI_ASSOCIATION,
    "emolex": LexiconKind.BINARY_ASSOCIATION,
    "osgood": LexiconKind.OSGOOD_DIMENSION,
    "ic": LexiconKind.INFORMATION_CONTENT,
}


def load_resources(config: ExperimentConfig) -> FeatureResources:
    """Load the lexicons needed by the enabled feature sets."""
    needed = config.enabled_sets
    loaded: dict[str, Any] = {}
    for source in needed:
        key = LEXICON_KEYS.get(source)
        if key is None:
            continue
        path = config.lexicons.get(key)
        if key == "categories":
            if path is None:
                loaded[key] = default_category_set()
                logger.warning(
                    "Using the shipped open category lists for the baseline; "
                    "scores are not comparable to the proprietary dictionaries"
                )
                continue
            if not path.exists():
                raise FeatureConfigError(
                    f"lexicon for feature set '{source}' not found: {path}"
                )
            reader = load_liwc_dictionary if path.suffix == ".dic" else load_category_set
            loaded[key] = reader(path)
            continue
        assert path is not None
        if not path.exists():
            raise FeatureConfigError(f"lexicon for feature set '{source}' not found: {path}")
        loaded[key] = load_affect_lexicon(path, _LEXICON_KINDS[key])
    return FeatureResources(**loaded)
