"""Tests for experiment configuration files."""

from pathlib import Path

import pytest

from affectlex import ConfigError, ExperimentConfig, FeatureConfigError, FeatureSource, load_resources
from affectlex.config import SEED_ENV, parse_feature_set
from affectlex.learner import Solver

CONFIG = """
[experiment]
dataset = "essays.csv"
output = "out"
k = 3
repetitions = 4
C = 0.5
baseline = "a"

[lexicons]
hashtag = "hashtag.tsv"

[[configuration]]
name = "a"
label = "MB"
sets = ["a"]

[[configuration]]
name = "h"
label = "FineEmo alone"
sets = ["fine_emo"]
"""


def write_config(tmp_path, text=CONFIG):
    path = tmp_path / "exp.toml"
    path.write_text(text)
    return path


class TestExperimentConfig:
    """Tests for loading and validating experiment configs."""

    def test_load(self, tmp_path):
        config = ExperimentConfig.from_toml(write_config(tmp_path), environ={})
        assert config.dataset == tmp_path / "essays.csv"
        assert config.output == tmp_path / "out"
        assert config.lexicons.hashtag == tmp_path / "hashtag.tsv"
        assert config.k == 3
        assert config.repetitions == 4
        assert config.seeds == (1, 2, 3, 4)
        assert config.solver == Solver.SMO
        assert [c.name for c in config.configurations] == ["a", "h"]
        assert config.configurations[0].features.sets == (FeatureSource.BASELINE,)
        assert config.configurations[1].learner.params.C == 0.5
        assert config.enabled_sets == {FeatureSource.BASELINE, FeatureSource.FINE_EMO}

    def test_seed_override(self, tmp_path):
        """Test that the environment variable shifts the seed list."""
        config = ExperimentConfig.from_toml(
            write_config(tmp_path), environ={SEED_ENV: "42"}
        )
        assert config.seeds == (42, 43, 44, 45)

    def test_bad_seed_override(self, tmp_path):
        with pytest.raises(ConfigError, match=SEED_ENV):
            ExperimentConfig.from_toml(write_config(tmp_path), environ={SEED_ENV: "x"})

    def test_explicit_seeds(self, tmp_path):
        text = CONFIG.replace("repetitions = 4", "repetitions = 2\nseeds = [7, 9]")
        config = ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})
        assert config.seeds == (7, 9)
        text = CONFIG.replace("repetitions = 4", "repetitions = 3\nseeds = [7, 9]")
        with pytest.raises(ConfigError, match="2 seed"):
            ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})

    def test_missing_lexicon_key(self, tmp_path):
        text = CONFIG.replace('hashtag = "hashtag.tsv"', "")
        with pytest.raises(ConfigError, match="feature set 'fine_emo'"):
            ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})

    def test_unknown_set(self, tmp_path):
        text = CONFIG.replace('sets = ["a"]', 'sets = ["z"]')
        with pytest.raises(ConfigError, match="unknown feature set"):
            ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})

    def test_empty_sets(self, tmp_path):
        text = CONFIG.replace('sets = ["a"]', "sets = []")
        with pytest.raises(ConfigError, match="no feature sets enabled"):
            ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})

    @pytest.mark.parametrize(
        "old,new,message",
        [
            ("k = 3", "k = 1", "k must be"),
            ("repetitions = 4", "repetitions = 1", "repetitions must be"),
            ("C = 0.5", "C = 0.0", "C must be positive"),
            ('baseline = "a"', 'baseline = "zz"', "baseline names no configuration"),
        ],
    )
    def test_invalid_values(self, tmp_path, old, new, message):
        text = CONFIG.replace(old, new)
        with pytest.raises(ConfigError, match=message):
            ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})

    def test_majority_baseline_name(self, tmp_path):
        text = CONFIG.replace('baseline = "a"', 'baseline = "majority"')
        config = ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})
        assert config.baseline == "majority"

    def test_duplicate_names(self, tmp_path):
        text = CONFIG.replace('name = "h"', 'name = "a"')
        with pytest.raises(ConfigError, match="duplicate configuration name"):
            ExperimentConfig.from_toml(write_config(tmp_path, text), environ={})

    def test_invalid_toml(self, tmp_path):
        path = write_config(tmp_path, "[experiment\n")
        with pytest.raises(ConfigError, match="invalid TOML") as excinfo:
            ExperimentConfig.from_toml(path, environ={})
        assert excinfo.value.path == str(path)

    def test_hash_is_stable(self, tmp_path):
        """Test that the config hash depends on content, not location."""
        a = ExperimentConfig.from_toml(write_config(tmp_path), environ={})
        other = tmp_path / "elsewhere"
        other.mkdir()
        b = ExperimentConfig.from_toml(write_config(other), environ={})
        assert a.hash == b.hash
        assert len(a.hash) == 12
        changed = ExperimentConfig.from_toml(
            write_config(other, CONFIG.replace("C = 0.5", "C = 2.0")), environ={}
        )
        assert changed.hash != a.hash
        assert a.provenance.seeds == (1, 2, 3, 4)

    def test_shipped_example(self):
        """Test that the committed ablation config is valid."""
        path = Path(__file__).parent.parent / "configs" / "feature_ablation.toml"
        config = ExperimentConfig.from_toml(path, environ={})
        assert [c.name for c in config.configurations][:3] == ["a", "b", "c"]
        assert config.configurations[-1].features.sets == (FeatureSource.FINE_EMO,)
        assert config.repetitions == 10


class TestFeatureSetNames:
    """Tests for feature set names."""

    def test_letters_and_names(self):
        assert parse_feature_set("f") == FeatureSource.FINE_EMO
        assert parse_feature_set("AIC") == FeatureSource.AIC
        with pytest.raises(ConfigError):
            parse_feature_set("g")


class TestLoadResources:
    """Tests for loading the lexicons a config needs."""

    def test_missing_file(self, tmp_path):
        config = ExperimentConfig.from_toml(write_config(tmp_path), environ={})
        with pytest.raises(FeatureConfigError, match="feature set 'fine_emo'"):
            load_resources(config)

    def test_default_categories(self, tmp_path, excerpt_path):
        (tmp_path / "hashtag.tsv").write_text(excerpt_path.read_text())
        config = ExperimentConfig.from_toml(write_config(tmp_path), environ={})
        resources = load_resources(config)
        assert resources.hashtag.categories == ("possessive", "apart")
        assert "articles" in resources.categories.names
        assert resources.ic is None
