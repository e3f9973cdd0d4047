"""Command-line entry point: `affectlex <command> ...`."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

from .analysis import (
    DEFAULT_TOP_K,
    DEFAULT_TOP_TERMS,
    format_ranking,
    format_ranking_table,
    format_top_terms,
    rank_features,
    top_terms,
)
from .config import ESSAY_FORMATS, ExperimentConfig, load_resources, parse_feature_set
from .corpus import TRAITS, Document, load_essays, load_inventory, load_tweets, normalize_category
from .errors import AffectlexError, ConfigError, CorpusFormatError
from .evaluation import (
    Configuration,
    compare_reports,
    format_report,
    format_summary_table,
    run_repetitions,
)
from .features import FeatureExtractor, FeatureMatrix, build_vocabulary, load_feature_matrix, save_feature_matrix
from .learner import DEFAULT_C, DEFAULT_EPOCHS, Solver, SvmParams, load_model, save_model, train_trait_models
from .lexicon import (
    DEFAULT_MIN_WORD_FREQ,
    build_ic_lexicon,
    build_pmi_lexicon,
    count_cooccurrences,
    load_affect_lexicon,
    load_synset_table,
    save_affect_lexicon,
)
from .synthetic import generate_synthetic, write_synthetic
from .tabular import Provenance, config_hash, format_float, write_lines

logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with exit status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _provenance(args: argparse.Namespace, seeds: Sequence[int] = ()) -> Provenance:
    settings = {
        key: str(value) if isinstance(value, Path) else value
        for key, value in sorted(vars(args).items())
        if key not in ("handler", "verbose", "quiet", "jobs", "out", "out_dir")
    }
    return Provenance(config_hash(settings), tuple(seeds))


def _labels_by_id(essays: Path, essay_format: str) -> dict[str, Document]:
    return {d.id: d for d in load_essays(essays, ESSAY_FORMATS[essay_format])}


def _aligned_documents(matrix: FeatureMatrix, docs: dict[str, Document]) -> list[Document]:
    missing = [doc_id for doc_id in matrix.ids if doc_id not in docs]
    if missing:
        raise CorpusFormatError(
            "feature rows without an essay", detail=", ".join(missing[:5])
        )
    return [docs[doc_id] for doc_id in matrix.ids]


# Commands


def cmd_build_lexicon(args: argparse.Namespace) -> int:
    inventory = load_inventory(args.inventory)
    tweets = load_tweets(args.tweets, inventory)
    counts = count_cooccurrences(tweets, jobs=args.jobs)
    lexicon = build_pmi_lexicon(
        counts,
        min_word_freq=args.min_word_freq,
        keep_nonpositive=args.keep_nonpositive,
        categories=inventory,
        source=Path(args.tweets).name,
    )
    save_affect_lexicon(lexicon, args.out, _provenance(args))
    return EXIT_OK


def cmd_build_ic_lexicon(args: argparse.Namespace) -> int:
    table = load_synset_table(args.synsets, args.index)
    save_affect_lexicon(build_ic_lexicon(table), args.out, _provenance(args))
    return EXIT_OK


def _configuration(config: ExperimentConfig, name: str) -> Configuration:
    for configuration in config.configurations:
        if configuration.name == name:
            return configuration
    raise ConfigError("no configuration with that name", detail=repr(name))


def cmd_extract(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_toml(args.config)
    configuration = _configuration(config, args.configuration)
    assert configuration.features is not None
    docs = load_essays(args.essays or config.dataset, config.format)
    resources = load_resources(config)
    extractor = FeatureExtractor(configuration.features, resources)
    vocabulary = None
    if configuration.features.uses_unigrams:
        vocabulary = build_vocabulary(docs, min_count=configuration.features.unigram_min_count)
    matrix = extractor.extract_matrix(docs, vocabulary, jobs=args.jobs)
    save_feature_matrix(matrix, args.out, config.provenance)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    matrix = load_feature_matrix(args.features)
    docs = _aligned_documents(matrix, _labels_by_id(args.essays, args.essay_format))
    params = SvmParams(C=args.C, epochs=args.epochs, seed=args.seed, solver=args.solver)
    labels = {trait: [d.label(trait) for d in docs] for trait in args.traits}
    models = train_trait_models(matrix, labels, params=params, jobs=args.jobs)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance = _provenance(args, [args.seed])
    for trait, model in models.items():
        save_model(model, out / f"{trait}.model", provenance)
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    matrix = load_feature_matrix(args.features)
    predictions = model.predict_many(matrix)
    lines = [_provenance(args, [model.params.seed]).comment_line(), "id\ttrait\tlabel\tmargin"]
    lines += [
        f"{doc_id}\t{model.trait}\t{p.label}\t{format_float(p.margin)}"
        for doc_id, p in zip(matrix.ids, predictions)
    ]
    if args.out:
        write_lines(args.out, lines)
    else:
        print("\n".join(lines))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_toml(args.config)
    docs = load_essays(config.dataset, config.format)
    resources = load_resources(config)
    jobs = args.jobs if args.jobs > 1 else config.jobs

    configurations = list(config.configurations)
    if config.majority:
        configurations.insert(0, Configuration.majority())
    reports = [
        run_repetitions(
            docs,
            configuration,
            seeds=config.seeds,
            k=config.k,
            traits=config.traits,
            resources=resources,
            jobs=jobs,
        )
        for configuration in configurations
    ]

    tests = {}
    if config.baseline is not None:
        baseline = next(r for r in reports if r.configuration.name == config.baseline)
        tests = {
            r.configuration.name: compare_reports(baseline, r)
            for r in reports
            if r is not baseline
        }

    out = Path(args.out_dir) if args.out_dir else config.output
    out.mkdir(parents=True, exist_ok=True)
    provenance = config.provenance
    write_lines(out / "report.tsv", format_report(reports, tests, provenance))
    table = format_summary_table(reports, tests)
    write_lines(out / "summary.txt", [provenance.comment_line()] + table)
    print("\n".join(table))
    return EXIT_OK


def cmd_rank_features(args: argparse.Namespace) -> int:
    matrix = load_feature_matrix(args.features)
    docs = _aligned_documents(matrix, _labels_by_id(args.essays, args.essay_format))
    sources = {parse_feature_set(s) for s in args.source} if args.source else None
    rankings = [
        rank_features(
            matrix,
            [d.label(trait) for d in docs],
            trait,
            args.top_k,
            sources=sources,
            jobs=args.jobs,
        )
        for trait in args.traits
    ]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance = _provenance(args)
    for ranking in rankings:
        write_lines(out / f"ranking_{ranking.trait}.tsv", format_ranking(ranking, provenance))
    table = format_ranking_table(rankings)
    write_lines(out / "ranking.txt", [provenance.comment_line()] + table)
    print("\n".join(table))
    return EXIT_OK


def cmd_top_terms(args: argparse.Namespace) -> int:
    lexicon = load_affect_lexicon(args.lexicon)
    for category in args.category:
        name = normalize_category(category)
        print(format_top_terms(name, top_terms(lexicon, name, args.n)))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    corpus = generate_synthetic(args.seed, args.n_docs, args.n_categories, args.signal)
    write_synthetic(corpus, args.out_dir, _provenance(args, [args.seed]))
    return EXIT_OK


# Parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer: {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def _traits(text: str) -> list[str]:
    traits = [t.strip().upper() for t in text.split(",") if t.strip()]
    unknown = [t for t in traits if t not in TRAITS]
    if unknown or not traits:
        raise argparse.ArgumentTypeError(f"unknown trait(s): {', '.join(unknown) or text}")
    return traits


def build_parser() -> ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker threads")

    parser = ArgumentParser(
        prog="affectlex",
        description="Emotion and specificity features for personality classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("build-lexicon", parents=[common], help="build a hashtag PMI lexicon")
    p.add_argument("--tweets", type=Path, required=True, help="one tweet per line")
    p.add_argument("--inventory", type=Path, required=True, help="emotion hashtags, one per line")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--min-word-freq", type=_positive_int, default=DEFAULT_MIN_WORD_FREQ)
    p.add_argument("--keep-nonpositive", action="store_true", help="keep PMI <= 0 entries")
    p.set_defaults(handler=cmd_build_lexicon)

    p = sub.add_parser("build-ic-lexicon", parents=[common], help="build a specificity lexicon")
    p.add_argument("--synsets", type=Path, required=True, help="synset_id, pos, ic rows")
    p.add_argument("--index", type=Path, required=True, help="term, pos, synset_id rows")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_build_ic_lexicon)

    p = sub.add_parser("extract", parents=[common], help="write a feature matrix")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--configuration", required=True, help="configuration name")
    p.add_argument("--essays", type=Path, help="override the configured dataset")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_extract)

    essay_args = argparse.ArgumentParser(add_help=False)
    essay_args.add_argument("--features", type=Path, required=True)
    essay_args.add_argument("--essays", type=Path, required=True, help="labels by id")
    essay_args.add_argument("--essay-format", choices=sorted(ESSAY_FORMATS), default="default")
    essay_args.add_argument("--traits", type=_traits, default=list(TRAITS))

    p = sub.add_parser("train", parents=[common, essay_args], help="train one model per trait")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--C", type=_positive_float, default=DEFAULT_C)
    p.add_argument("--epochs", type=_positive_int, default=DEFAULT_EPOCHS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--solver", choices=[s.value for s in Solver], default=Solver.SMO.value)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="apply a trained model")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--out", type=Path, help="default: standard output")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common], help="cross-validate configurations")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, help="override the configured output directory")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("rank-features", parents=[common, essay_args], help="rank by information gain")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--top-k", type=_positive_int, default=DEFAULT_TOP_K)
    p.add_argument("--source", action="append", help="feature set to rank (repeatable)")
    p.set_defaults(handler=cmd_rank_features)

    p = sub.add_parser("top-terms", parents=[common], help="list a category's top terms")
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--category", action="append", required=True)
    p.add_argument("--n", type=_positive_int, default=DEFAULT_TOP_TERMS)
    p.set_defaults(handler=cmd_top_terms)

    p = sub.add_parser("synth", parents=[common], help="generate a planted-signal corpus")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n-docs", type=int, default=300)
    p.add_argument("--n-categories", type=int, default=20)
    p.add_argument("--signal", type=float, default=3.0)
    p.set_defaults(handler=cmd_synth)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth" and (args.n_docs < 30 or args.n_categories < 2 or args.signal < 0):
        parser.error("synth needs --n-docs >= 30, --n-categories >= 2 and --signal >= 0")

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        return args.handler(args)
    except (AffectlexError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


run_command = main


if __name__ == "__main__":
    sys.exit(main())
