"""Tests for the planted-signal corpus generator."""

import hashlib
import tomllib

import pytest

from affectlex import TRAITS, Label, LexiconKind, generate_synthetic, load_affect_lexicon, load_essays, write_synthetic
from affectlex.corpus import load_inventory, load_tweets
from affectlex.lexicon import load_synset_table
from affectlex.synthetic import bayes_macro_f1, category_names
from affectlex.tabular import Provenance, split_preamble


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic(seed=3, n_docs=40, n_categories=5, signal_strength=2.0)


class TestGenerateSynthetic:
    """Tests for corpus generation."""

    def test_shape(self, corpus):
        assert len(corpus.documents) == 40
        assert corpus.documents[0].id == "doc0001"
        assert corpus.documents[-1].id == "doc0040"
        assert corpus.categories == ("possessive", "apart", "excited", "lonely", "proud")
        for doc in corpus.documents:
            assert set(doc.labels) == set(TRAITS)
            assert doc.tokens

    def test_same_seed_same_corpus(self, corpus):
        again = generate_synthetic(seed=3, n_docs=40, n_categories=5, signal_strength=2.0)
        assert [d.tokens for d in again.documents] == [d.tokens for d in corpus.documents]
        assert [d.labels for d in again.documents] == [d.labels for d in corpus.documents]
        assert again.tweet_texts == corpus.tweet_texts
        assert again.params == corpus.params

    def test_other_seed_other_corpus(self, corpus):
        other = generate_synthetic(seed=4, n_docs=40, n_categories=5, signal_strength=2.0)
        assert [d.tokens for d in other.documents] != [d.tokens for d in corpus.documents]

    def test_planted_categories(self, corpus):
        for trait in TRAITS:
            weights = corpus.params.planted[trait]
            assert len(weights) == 3
            assert len({w.category for w in weights}) == 3
            assert all(abs(w.weight) == 2.0 for w in weights)
            assert 0.0 <= corpus.params.yes_rate[trait] <= 1.0

    def test_no_signal(self):
        """Test that zero strength makes the best classifier a coin flip."""
        corpus = generate_synthetic(seed=5, n_docs=30, n_categories=2, signal_strength=0.0)
        for trait in TRAITS:
            assert corpus.params.bayes_macro_f1[trait] == pytest.approx(1 / 3)
            assert all(w.weight == 0.0 for w in corpus.params.planted[trait])

    def test_hashtag_lexicon(self, corpus):
        lexicon = corpus.hashtag_lexicon
        assert lexicon.kind == LexiconKind.PMI_ASSOCIATION
        assert lexicon.categories == corpus.categories
        for category in corpus.categories:
            assert lexicon.category(category)[category] > 0

    @pytest.mark.parametrize(
        "n_docs,n_categories,signal",
        [(29, 5, 1.0), (40, 1, 1.0), (40, 5, -0.5)],
        ids=["few-docs", "one-category", "negative-signal"],
    )
    def test_invalid_arguments(self, n_docs, n_categories, signal):
        with pytest.raises(ValueError):
            generate_synthetic(seed=1, n_docs=n_docs, n_categories=n_categories, signal_strength=signal)


class TestHelpers:
    """Tests for small generator helpers."""

    def test_category_names_extend(self):
        names = category_names(28)
        assert len(set(names)) == 28
        assert names[-2:] == ("emotion27", "emotion28")

    def test_bayes_macro_f1(self):
        assert bayes_macro_f1([1.0, 1.0, 0.0, 0.0]) == 1.0
        assert bayes_macro_f1([0.5] * 4) == pytest.approx(1 / 3)


class TestWriteSynthetic:
    """Tests for writing a corpus to disk."""

    def test_files_load_back(self, corpus, tmp_path):
        """Test that every written file reads back with the package loaders."""
        paths = write_synthetic(corpus, tmp_path, Provenance("abc123", (3,)))
        assert all(path.exists() for path in paths.values())

        docs = load_essays(paths["essays"])
        assert [d.id for d in docs] == [d.id for d in corpus.documents]
        assert [d.labels for d in docs] == [d.labels for d in corpus.documents]
        assert [d.tokens for d in docs] == [d.tokens for d in corpus.documents]

        assert load_inventory(paths["inventory"]) == list(corpus.categories)
        hashtag = load_affect_lexicon(paths["hashtag"], LexiconKind.PMI_ASSOCIATION)
        assert hashtag.categories == corpus.categories
        emolex = load_affect_lexicon(paths["emolex"], LexiconKind.BINARY_ASSOCIATION)
        assert emolex.categories == corpus.emolex.categories
        table = load_synset_table(paths["synsets"], paths["synset_index"])
        assert len(table.rows) == len(corpus.synsets.rows)

        text = paths["generator"].read_text()
        assert text.startswith("# config=abc123 seeds=3")
        with open(paths["generator"], "rb") as f:
            params = tomllib.load(f)
        assert params["generator"]["seed"] == 3
        assert params["generator"]["n_docs"] == 40
        assert set(params["planted"]) == set(TRAITS)

    def test_every_file_is_stamped(self, corpus, tmp_path):
        """Test the provenance line on text files and the sidecar of the essay table."""
        provenance = Provenance("abc123", (3,))
        paths = write_synthetic(corpus, tmp_path, provenance)
        for role in ("tweets", "inventory", "hashtag", "synsets", "synset_index", "categories", "generator"):
            assert provenance.comment_line() in paths[role].read_text().splitlines(), role

        sidecar = paths["essays_provenance"].read_text().splitlines()
        assert sidecar[0] == provenance.comment_line()
        digest = hashlib.sha256(paths["essays"].read_bytes()).hexdigest()
        assert split_preamble(sidecar).metadata["sha256"] == digest

        tweets = load_tweets(paths["tweets"], corpus.categories)
        assert len(tweets) == len(corpus.tweets)

    def test_unstamped_without_provenance(self, corpus, tmp_path):
        paths = write_synthetic(corpus, tmp_path)
        assert "essays_provenance" not in paths
        assert not paths["tweets"].read_text().startswith("#")

    def test_labels_are_binary(self, corpus):
        labels = {doc.label(t) for doc in corpus.documents for t in TRAITS}
        assert labels <= {Label.YES, Label.NO}
