"""Tests for feature extraction."""

import random

import numpy as np
import pytest

from affectlex import (
    FeatureConfig,
    FeatureConfigError,
    FeatureExtractor,
    FeatureResources,
    FeatureSchema,
    FeatureSource,
    LexiconFormatError,
    LexiconKind,
    ModelFormatError,
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
from affectlex.features import (
    AicDenominator,
    AicMode,
    CategoryLexiconSet,
    FeatureMatrix,
    FeatureVector,
    Vocabulary,
    WordCategory,
    default_category_set,
    load_feature_matrix,
    load_liwc_dictionary,
    parse_category_set,
    save_feature_matrix,
)
from affectlex.lexicon import (
    BASIC_EMOTIONS,
    NOUN_IC,
    OSGOOD_DIMENSIONS,
    VERB_IC,
    lexicon_from_scores,
)
from affectlex.tabular import Provenance
from conftest import doc


@pytest.fixture
def emolex():
    return lexicon_from_scores(
        LexiconKind.BINARY_ASSOCIATION,
        {"joy": {"happy": 1.0}, "sadness": {"sad": 1.0}},
        categories=BASIC_EMOTIONS,
    )


@pytest.fixture
def osgood():
    return lexicon_from_scores(
        LexiconKind.OSGOOD_DIMENSION,
        {
            "evaluative": {"good": 2.0, "bad": -2.0},
            "potency": {"strong": 1.5},
            "activity": {"run": 1.0, "good": 0.5},
        },
    )


@pytest.fixture
def ic_lexicon():
    return lexicon_from_scores(
        LexiconKind.INFORMATION_CONTENT,
        {NOUN_IC: {"ball": 7.1, "run": 3.0}, VERB_IC: {"run": 2.0, "kick": 5.0}},
    )


@pytest.fixture
def categories():
    return CategoryLexiconSet(
        (
            WordCategory.from_patterns("articles", ["a", "the"]),
            WordCategory.from_patterns("friends", ["friend*"]),
        )
    )


@pytest.fixture
def resources(hashtag_lexicon, emolex, osgood, ic_lexicon, categories):
    return FeatureResources(
        hashtag=hashtag_lexicon,
        emolex=emolex,
        osgood=osgood,
        ic=ic_lexicon,
        categories=categories,
    )


ALL_SETS = tuple(FeatureSource)


def random_doc(rng, words, doc_id="d"):
    return doc([rng.choice(words) for _ in range(rng.randint(5, 30))], doc_id=doc_id)


class TestAffectFeatures:
    """Tests for the lexicon-averaging families."""

    def test_avg_association(self, hashtag_lexicon):
        """Test the hand-computed average on a four-token document."""
        d = doc(["possessive", "lover", "mine", "the"])
        assert avg_association(d, hashtag_lexicon, "possessive") == pytest.approx(4.1455)
        assert avg_association(d, hashtag_lexicon, "apart") == 0.0

    def test_empty_document(self, hashtag_lexicon):
        vector = fine_emotion_features(doc([]), hashtag_lexicon)
        assert vector.values == (0.0, 0.0)

    def test_fine_emotion_names(self, hashtag_lexicon):
        vector = fine_emotion_features(doc(["tear"]), hashtag_lexicon)
        assert vector.schema.names == ("fine_emo:possessive", "fine_emo:apart")
        assert vector["fine_emo:apart"] == pytest.approx(4.065)

    def test_basic_emotions(self, emolex):
        """Test counting of repeated binary associations."""
        vector = basic_emotion_features(doc(["happy", "happy", "sad", "x"]), emolex)
        assert len(vector) == 8
        assert vector["basic_emo:joy"] == pytest.approx(0.5)
        assert vector["basic_emo:sadness"] == pytest.approx(0.25)
        assert vector["basic_emo:anger"] == 0.0

    def test_basic_emotions_need_eight(self):
        small = lexicon_from_scores(
            LexiconKind.BINARY_ASSOCIATION, {"joy": {"happy": 1.0}}
        )
        with pytest.raises(FeatureConfigError, match="8 categories"):
            basic_emotion_features(doc(["happy"]), small)

    def test_wrong_lexicon_kind(self, emolex):
        with pytest.raises(FeatureConfigError, match="pmi_association"):
            fine_emotion_features(doc(["happy"]), emolex)

    def test_coarse_affect(self, osgood):
        """Test the three Osgood dimension averages."""
        vector = coarse_affect_features(doc(["good", "strong", "bad", "run"]), osgood)
        assert vector.schema.names == tuple(f"coarse_aff:{d}" for d in OSGOOD_DIMENSIONS)
        assert vector.values == pytest.approx((0.0, 0.375, 0.375))

    def test_coarse_affect_subset(self, osgood):
        """Test selecting a single dimension."""
        vector = coarse_affect_features(doc(["strong"]), osgood, ("potency",))
        assert vector.as_dict() == {"coarse_aff:potency": 1.5}

    def test_coarse_affect_unknown_dimension(self, osgood):
        """Test rejection of dimensions outside the three."""
        with pytest.raises(FeatureConfigError, match="unknown Osgood"):
            coarse_affect_features(doc(["good"]), osgood, ("valence",))


class TestAffectInvariants:
    """Properties every averaging family must have."""

    WORDS = ["possessive", "lover", "mine", "apart", "tear", "rain", "the", "a"]

    def test_token_order(self, hashtag_lexicon):
        """Test that shuffling tokens leaves values unchanged."""
        rng = random.Random(7)
        for _ in range(20):
            d = random_doc(rng, self.WORDS)
            tokens = list(d.tokens)
            rng.shuffle(tokens)
            shuffled = doc(tokens)
            assert fine_emotion_features(shuffled, hashtag_lexicon).values == (
                fine_emotion_features(d, hashtag_lexicon).values
            )

    def test_document_duplication(self, hashtag_lexicon):
        """Test that a document concatenated with itself scores the same."""
        rng = random.Random(8)
        for _ in range(20):
            d = random_doc(rng, self.WORDS)
            doubled = doc(d.tokens + d.tokens)
            assert fine_emotion_features(doubled, hashtag_lexicon).values == pytest.approx(
                fine_emotion_features(d, hashtag_lexicon).values
            )

    def test_linear_in_scores(self, hashtag_lexicon):
        """Test that scaling the lexicon scales the features."""
        scaled = lexicon_from_scores(
            LexiconKind.PMI_ASSOCIATION,
            {
                c: {t: 3.0 * s for t, s in hashtag_lexicon.category(c).items()}
                for c in hashtag_lexicon.categories
            },
        )
        rng = random.Random(9)
        for _ in range(20):
            d = random_doc(rng, self.WORDS)
            base = np.array(fine_emotion_features(d, hashtag_lexicon).values)
            assert fine_emotion_features(d, scaled).values == pytest.approx(
                tuple(3.0 * base)
            )

    def test_unknown_words_dilute(self, hashtag_lexicon):
        """Test that adding out-of-lexicon tokens only shrinks magnitudes."""
        d = doc(["mine", "tear"])
        padded = doc(["mine", "tear", "zzz", "yyy"])
        base = fine_emotion_features(d, hashtag_lexicon).values
        diluted = fine_emotion_features(padded, hashtag_lexicon).values
        assert diluted == pytest.approx(tuple(v / 2 for v in base))


class TestSpecificity:
    """Tests for average information content."""

    def test_both_matched(self, ic_lexicon):
        """Test that each part-of-speech hit is a match."""
        vector = aic_features(doc(["ball", "run", "zzz"]), ic_lexicon)
        assert vector.schema.names == ("aic:both",)
        assert vector["aic:both"] == pytest.approx((7.1 + 3.0 + 2.0) / 3)

    def test_nouns_only(self, ic_lexicon):
        """Test restricting to noun senses."""
        vector = aic_features(doc(["ball", "kick"]), ic_lexicon, AicMode.NOUNS)
        assert vector["aic:nouns"] == pytest.approx(7.1)

    def test_total_denominator(self, ic_lexicon):
        """Test dividing by every token."""
        vector = aic_features(
            doc(["ball", "zzz"]), ic_lexicon, "nouns", denominator=AicDenominator.TOTAL
        )
        assert vector["aic:nouns_total"] == pytest.approx(3.55)

    def test_no_matches(self, ic_lexicon):
        assert aic_features(doc(["zzz"]), ic_lexicon).values == (0.0,)


class TestUnigramsAndBaseline:
    """Tests for the unigram and baseline families."""

    def test_relative_frequency(self):
        """Test unigram relative frequencies."""
        vector = unigram_features(doc(["a", "a", "b", "c"]), Vocabulary(("a", "b")))
        assert vector.schema.names == ("unigram:a", "unigram:b")
        assert vector.values == (0.5, 0.25)

    def test_vocabulary_min_count(self):
        """Test vocabulary thresholds and ordering."""
        docs = [doc(["b", "a", "a"]), doc(["c", "a", "b"])]
        assert build_vocabulary(docs).terms == ("a", "b", "c")
        assert build_vocabulary(docs, min_count=2).terms == ("a", "b")
        assert build_vocabulary(docs, max_terms=1).terms == ("a",)

    def test_type_token_ratio(self, categories):
        """Test the structural statistics."""
        vector = baseline_features(doc(["a", "a", "b"], punctuation=3), categories)
        assert vector["baseline:type_token_ratio"] == pytest.approx(2 / 3)
        assert vector["baseline:word_count"] == 3.0
        assert vector["baseline:words_per_sentence"] == 3.0
        assert vector["baseline:punctuation"] == pytest.approx(1.0)

    def test_category_rates(self, categories):
        """Test exact and prefix category matches."""
        vector = baseline_features(
            doc(["the", "friends", "friendly", "wonderful"]), categories
        )
        assert vector["baseline:articles"] == pytest.approx(0.25)
        assert vector["baseline:friends"] == pytest.approx(0.5)
        assert vector["baseline:long_words"] == pytest.approx(0.75)

    def test_baseline_duplication(self, categories):
        """Test that doubling tokens, sentences and punctuation keeps every rate."""
        words = ["the", "a", "friends", "friendly", "wonderful", "rain", "mine"]
        rng = random.Random(11)
        for _ in range(20):
            tokens = [rng.choice(words) for _ in range(rng.randint(1, 30))]
            sentences = rng.randint(1, 4)
            punctuation = rng.randint(0, 6)
            single = baseline_features(doc(tokens, sentence_count=sentences, punctuation=punctuation), categories)
            double = baseline_features(
                doc(tokens * 2, sentence_count=2 * sentences, punctuation=2 * punctuation), categories
            )
            for name in single.schema.names:
                if name == "baseline:word_count":
                    assert double[name] == 2 * single[name]
                elif name == "baseline:type_token_ratio":
                    assert double[name] == pytest.approx(single[name] / 2, abs=1e-12)
                else:
                    assert double[name] == pytest.approx(single[name], abs=1e-12)

    def test_empty_baseline(self, categories):
        """Test that an empty document gives an all-zero baseline."""
        vector = baseline_features(doc([]), categories)
        assert set(vector.values) == {0.0}


class TestCategoryFiles:
    """Tests for the category list formats."""

    def test_parse_sections(self):
        """Test the sectioned category format."""
        cats = parse_category_set(["# comment", "[pets]", "dog", "cat*", "", "[x]", "y"])
        assert cats.names == ("pets", "x")
        assert cats.categories[0].matches("catalog")
        assert not cats.categories[0].matches("dogs")

    def test_pattern_before_section(self):
        """Test that patterns need an enclosing section."""
        with pytest.raises(LexiconFormatError, match="before the first"):
            parse_category_set(["dog"])

    def test_default_set(self):
        """Test the bundled open category lists."""
        cats = default_category_set()
        assert cats.names[0] == "articles"
        assert "negative_emotion" in cats.names

    def test_liwc_dictionary(self, tmp_path):
        """Test reading a dictionary with a category header block."""
        path = tmp_path / "mini.dic"
        path.write_text("%\n1\tfunct\n2\tsocial\n%\nthe\t1\nfriend*\t2\nwe\t1\t2\n")
        cats = load_liwc_dictionary(path)
        assert cats.names == ("funct", "social")
        assert cats.categories[1].matches("friendship")
        assert cats.categories[1].matches("we")

    def test_liwc_unknown_id(self, tmp_path):
        """Test rejection of undeclared category ids."""
        path = tmp_path / "bad.dic"
        path.write_text("%\n1\tfunct\n%\nthe\t7\n")
        with pytest.raises(LexiconFormatError, match="unknown category id"):
            load_liwc_dictionary(path)


class TestSchema:
    """Tests for feature schemas and vectors."""

    def test_duplicate_names(self):
        """Test that feature names must be unique."""
        with pytest.raises(ValueError, match="duplicate"):
            FeatureSchema.for_family(FeatureSource.UNIGRAM, ["a", "a"])

    def test_hash_depends_on_order(self):
        """Test that the schema hash is order sensitive and stable."""
        ab = FeatureSchema.for_family(FeatureSource.UNIGRAM, ["a", "b"])
        ba = FeatureSchema.for_family(FeatureSource.UNIGRAM, ["b", "a"])
        assert ab.hash != ba.hash
        assert ab.hash == FeatureSchema.for_family(FeatureSource.UNIGRAM, ["a", "b"]).hash
        assert len(ab.hash) == 16

    def test_from_names(self):
        """Test rebuilding a schema from qualified names."""
        schema = FeatureSchema.from_names(["aic:both", "fine_emo:apart"])
        assert schema.features[0] == ("aic:both", FeatureSource.AIC)
        with pytest.raises(ModelFormatError):
            FeatureSchema.from_names(["nofamily"])

    def test_vector_length(self):
        """Test that vectors must match their schema."""
        schema = FeatureSchema.for_family(FeatureSource.UNIGRAM, ["a"])
        with pytest.raises(ValueError):
            FeatureVector(schema, (1.0, 2.0))
        with pytest.raises(ValueError, match="finite"):
            FeatureVector(schema, (float("nan"),))


class TestExtractor:
    """Tests for assembling several families."""

    def test_family_order(self, resources):
        """Test that families concatenate in the fixed order."""
        config = FeatureConfig(sets=(FeatureSource.FINE_EMO, FeatureSource.AIC))
        assert config.sets == (FeatureSource.AIC, FeatureSource.FINE_EMO)
        vector = assemble(doc(["ball", "mine"]), config, resources)
        assert vector.schema.names == ("aic:both", "fine_emo:possessive", "fine_emo:apart")

    def test_no_sets(self, resources):
        with pytest.raises(FeatureConfigError, match="no feature sets enabled"):
            FeatureExtractor(FeatureConfig(sets=()), resources)

    def test_missing_resource(self, hashtag_lexicon):
        """Test that enabled families need their lexicon."""
        config = FeatureConfig(sets=(FeatureSource.AIC,))
        with pytest.raises(FeatureConfigError, match="feature set 'aic'"):
            FeatureExtractor(config, FeatureResources(hashtag=hashtag_lexicon))

    def test_unigrams_need_vocabulary(self, resources):
        """Test that unigram extraction fails without a vocabulary."""
        extractor = FeatureExtractor(FeatureConfig(sets=(FeatureSource.UNIGRAM,)), resources)
        with pytest.raises(FeatureConfigError, match="vocabulary"):
            extractor.extract(doc(["a"]))

    def test_matrix_matches_vectors(self, resources):
        """Test that the block path agrees with per-document extraction."""
        rng = random.Random(4)
        words = ["ball", "run", "good", "happy", "mine", "tear", "the", "friends", "x"]
        docs = [random_doc(rng, words, f"d{i}") for i in range(12)]
        vocabulary = build_vocabulary(docs)
        extractor = FeatureExtractor(FeatureConfig(sets=ALL_SETS), resources)
        matrix = extractor.extract_matrix(docs, vocabulary, jobs=3)
        assert matrix.ids == tuple(d.id for d in docs)
        for i, d in enumerate(docs):
            vector = extractor.extract(d, vocabulary)
            assert vector.schema == matrix.schema
            np.testing.assert_allclose(matrix.values[i], vector.values)

    def test_empty_document_list(self, resources):
        extractor = FeatureExtractor(FeatureConfig(sets=(FeatureSource.AIC,)), resources)
        matrix = extractor.extract_matrix([])
        assert matrix.values.shape == (0, 1)


class TestMatrixFiles:
    """Tests for saving and loading feature matrices."""

    def test_save_and_load(self, resources, tmp_path):
        """Test that a saved matrix loads back exactly."""
        rng = random.Random(5)
        docs = [random_doc(rng, ["good", "mine", "tear", "ball"], f"d{i}") for i in range(5)]
        extractor = FeatureExtractor(
            FeatureConfig(sets=(FeatureSource.AIC, FeatureSource.FINE_EMO)), resources
        )
        matrix = extractor.extract_matrix(docs)
        path = tmp_path / "features.tsv"
        save_feature_matrix(matrix, path, Provenance("cafe", (1,)))
        again = load_feature_matrix(path)
        assert again.ids == matrix.ids
        assert again.schema.hash == matrix.schema.hash
        np.testing.assert_array_equal(again.values, matrix.values)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "features.tsv"
        path.write_text("doc\taic:both\nd1\t1.0\n")
        with pytest.raises(ModelFormatError, match="must start with 'id'"):
            load_feature_matrix(path)

    def test_bad_value(self, tmp_path):
        path = tmp_path / "features.tsv"
        path.write_text("id\taic:both\nd1\tlots\n")
        with pytest.raises(ModelFormatError) as excinfo:
            load_feature_matrix(path)
        assert excinfo.value.line == 2
        assert excinfo.value.column == "aic:both"

    def test_select_rows(self):
        schema = FeatureSchema.for_family(FeatureSource.UNIGRAM, ["a"])
        matrix = FeatureMatrix(("x", "y", "z"), schema, np.array([[1.0], [2.0], [3.0]]))
        picked = matrix.select_rows([2, 0])
        assert picked.ids == ("z", "x")
        assert picked.column("unigram:a").tolist() == [3.0, 1.0]
