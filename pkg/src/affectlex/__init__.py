"""Emotion and specificity lexicon features for personality classification."""

from .corpus import (
    TRAITS,
    Document,
    EssayFormat,
    Label,
    LabeledTweet,
    load_essays,
    load_tweets,
    parse_essays,
    tokenize,
)
from .errors import (
    AffectlexError,
    ConfigError,
    CorpusFormatError,
    DataError,
    EvaluationError,
    FeatureConfigError,
    LexiconFormatError,
    ModelFormatError,
    SchemaMismatchError,
    TrainingError,
    UnknownCategoryError,
)
from .lexicon import (
    AffectLexicon,
    CountTable,
    LexiconKind,
    build_ic_lexicon,
    build_pmi_lexicon,
    count_cooccurrences,
    load_affect_lexicon,
    load_synset_table,
    merge_counts,
    save_affect_lexicon,
)
from .features import (
    CategoryLexiconSet,
    FeatureConfig,
    FeatureExtractor,
    FeatureMatrix,
    FeatureResources,
    FeatureSchema,
    FeatureSource,
    FeatureVector,
    aic_features,
    assemble,
    avg_association,
    baseline_features,
    basic_emotion_features,
    build_vocabulary,
    coarse_affect_features,
    fine_emotion_features,
    unigram_features,
)
from .learner import (
    MajorityModel,
    Prediction,
    TrainedModel,
    load_model,
    predict,
    save_model,
    train_majority,
    train_svm,
)
from .evaluation import (
    Configuration,
    EvalReport,
    FoldPlan,
    SignificanceResult,
    cross_validate,
    macro_f1,
    paired_t_test,
    repeat_and_test,
    run_repetitions,
    stratified_folds,
)
from .analysis import GainRanking, information_gain, rank_features, top_terms
from .config import ExperimentConfig, load_resources
from .synthetic import generate_synthetic, write_synthetic

__all__ = [
    "TRAITS",
    "Document",
    "EssayFormat",
    "Label",
    "LabeledTweet",
    "load_essays",
    "load_tweets",
    "parse_essays",
    "tokenize",
    "AffectlexError",
    "ConfigError",
    "CorpusFormatError",
    "DataError",
    "EvaluationError",
    "FeatureConfigError",
    "LexiconFormatError",
    "ModelFormatError",
    "SchemaMismatchError",
    "TrainingError",
    "UnknownCategoryError",
    "AffectLexicon",
    "CountTable",
    "LexiconKind",
    "build_ic_lexicon",
    "build_pmi_lexicon",
    "count_cooccurrences",
    "load_affect_lexicon",
    "load_synset_table",
    "merge_counts",
    "save_affect_lexicon",
    "CategoryLexiconSet",
    "FeatureConfig",
    "FeatureExtractor",
    "FeatureMatrix",
    "FeatureResources",
    "FeatureSchema",
    "FeatureSource",
    "FeatureVector",
    "aic_features",
    "assemble",
    "avg_association",
    "baseline_features",
    "basic_emotion_features",
    "build_vocabulary",
    "coarse_affect_features",
    "fine_emotion_features",
    "unigram_features",
    "MajorityModel",
    "Prediction",
    "TrainedModel",
    "load_model",
    "predict",
    "save_model",
    "train_majority",
    "train_svm",
    "Configuration",
    "EvalReport",
    "FoldPlan",
    "SignificanceResult",
    "cross_validate",
    "macro_f1",
    "paired_t_test",
    "repeat_and_test",
    "run_repetitions",
    "stratified_folds",
    "GainRanking",
    "information_gain",
    "rank_features",
    "top_terms",
    "ExperimentConfig",
    "load_resources",
    "generate_synthetic",
    "write_synthetic",
]
