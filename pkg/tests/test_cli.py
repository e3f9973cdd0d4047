"""Tests for the command-line interface."""

import pytest

from affectlex import LexiconKind, load_affect_lexicon, load_model
from affectlex.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from affectlex.config import SEED_ENV

EXPERIMENT = """
[experiment]
dataset = "essays.csv"
output = "out"
k = 2
repetitions = 2
baseline = "a"

[lexicons]
hashtag = "hashtag.tsv"
categories = "categories.cats"

[[configuration]]
name = "a"
label = "MB"
sets = ["a"]

[[configuration]]
name = "f"
label = "MB + FineEmo"
sets = ["a", "f"]
"""


@pytest.fixture
def synth_dir(tmp_path):
    out = tmp_path / "synth"
    assert main(["synth", "--out-dir", str(out), "--seed", "4", "--n-docs", "60", "--n-categories", "4", "-q"]) == EXIT_OK
    (out / "exp.toml").write_text(EXPERIMENT)
    return out


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


class TestUsage:
    """Tests for argument handling."""

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["top-terms", "--bogus"])
        assert excinfo.value.code == EXIT_USAGE

    def test_missing_command(self):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == EXIT_USAGE

    def test_bad_trait(self, tmp_path):
        """Test that trait names are checked."""
        with pytest.raises(SystemExit) as excinfo:
            main(["train", "--features", "f", "--essays", "e", "--out-dir", str(tmp_path), "--traits", "XYZ"])
        assert excinfo.value.code == EXIT_USAGE

    def test_synth_range(self, tmp_path):
        """Test that the generator's limits are usage errors."""
        with pytest.raises(SystemExit) as excinfo:
            main(["synth", "--out-dir", str(tmp_path), "--n-docs", "10"])
        assert excinfo.value.code == EXIT_USAGE


class TestBuildLexicon:
    """Tests for the build-lexicon command."""

    def test_build(self, tweet_file, inventory_file, tmp_path):
        """Test building a lexicon from a tiny tweet corpus."""
        out = tmp_path / "lexicon.tsv"
        code = main(
            [
                "build-lexicon",
                "--tweets", str(tweet_file),
                "--inventory", str(inventory_file),
                "--out", str(out),
                "--min-word-freq", "1",
            ]
        )
        assert code == EXIT_OK
        lexicon = load_affect_lexicon(out, LexiconKind.PMI_ASSOCIATION)
        assert lexicon.categories == ("possessive", "apart")
        assert lexicon.score("possessive", "mine") == pytest.approx(1.0)
        assert any(line.startswith("# config=") for line in out.read_text().splitlines())

    def test_missing_input(self, inventory_file, tmp_path):
        """Test that an unreadable input is a data error."""
        code = main(
            [
                "build-lexicon",
                "--tweets", str(tmp_path / "absent.txt"),
                "--inventory", str(inventory_file),
                "--out", str(tmp_path / "out.tsv"),
            ]
        )
        assert code == EXIT_DATA


class TestTopTerms:
    """Tests for the top-terms command."""

    def test_listing(self, excerpt_path, capsys):
        """Test the listing of the bundled excerpt."""
        code = main(["top-terms", "--lexicon", str(excerpt_path), "--category", "#Apart", "--n", "2"])
        assert code == EXIT_OK
        assert capsys.readouterr().out == "#apart: 1. apart: 4.6  2. tear: 4.065\n"

    def test_unknown_category(self, excerpt_path, capsys):
        """Test that an undefined category is a data error."""
        code = main(["top-terms", "--lexicon", str(excerpt_path), "--category", "joy"])
        assert code == EXIT_DATA
        assert "joy" in capsys.readouterr().err


class TestSynth:
    """Tests for the synth command."""

    def test_deterministic(self, tmp_path):
        """Test that the same seed writes the same files."""
        args = ["synth", "--seed", "9", "--n-docs", "30", "--n-categories", "3", "-q"]
        assert main(args + ["--out-dir", str(tmp_path / "one")]) == EXIT_OK
        assert main(args + ["--out-dir", str(tmp_path / "two")]) == EXIT_OK
        for name in ("essays.csv", "hashtag.tsv", "generator.toml", "synsets.tsv"):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


class TestEvaluate:
    """Tests for the evaluate command."""

    def test_reports_are_reproducible(self, synth_dir, tmp_path, capsys):
        """Test that two runs write byte-identical reports."""
        first, second = tmp_path / "run1", tmp_path / "run2"
        config = str(synth_dir / "exp.toml")
        assert main(["evaluate", "--config", config, "--out-dir", str(first), "-q"]) == EXIT_OK
        assert main(["evaluate", "--config", config, "--out-dir", str(second), "-q"]) == EXIT_OK
        report = (first / "report.tsv").read_bytes()
        assert report == (second / "report.tsv").read_bytes()
        assert (first / "summary.txt").read_bytes() == (second / "summary.txt").read_bytes()

        lines = report.decode().splitlines()
        assert lines[0].startswith("# config=")
        assert lines[0].endswith("seeds=1,2")
        # header plus five traits for majority, a and f
        assert len(lines) == 2 + 5 * 3
        assert "MB + FineEmo" in capsys.readouterr().out

    def test_seed_override(self, synth_dir, tmp_path, monkeypatch):
        """Test that the environment seed shows in the provenance line."""
        monkeypatch.setenv(SEED_ENV, "5")
        out = tmp_path / "run"
        assert main(["evaluate", "--config", str(synth_dir / "exp.toml"), "--out-dir", str(out), "-q"]) == EXIT_OK
        first = (out / "report.tsv").read_text().splitlines()[0]
        assert first.endswith("seeds=5,6")

    def test_missing_lexicon(self, synth_dir, tmp_path, capsys):
        """Test that a missing lexicon file names its feature set."""
        (synth_dir / "hashtag.tsv").unlink()
        code = main(["evaluate", "--config", str(synth_dir / "exp.toml"), "--out-dir", str(tmp_path / "run")])
        assert code == EXIT_DATA
        assert "fine_emo" in capsys.readouterr().err

    def test_invalid_config(self, tmp_path, capsys):
        """Test that a bad config is a data error."""
        path = tmp_path / "bad.toml"
        path.write_text("[experiment]\nk = 3\n")
        assert main(["evaluate", "--config", str(path)]) == EXIT_DATA
        assert "dataset" in capsys.readouterr().err


class TestTrainPredict:
    """Tests for extract, train, predict and rank-features."""

    def test_pipeline(self, synth_dir, tmp_path, capsys):
        """Test the full command pipeline on a generated corpus."""
        features = tmp_path / "features.tsv"
        essays = str(synth_dir / "essays.csv")
        code = main(
            ["extract", "--config", str(synth_dir / "exp.toml"), "--configuration", "f", "--out", str(features), "-q"]
        )
        assert code == EXIT_OK

        models = tmp_path / "models"
        code = main(
            ["train", "--features", str(features), "--essays", essays, "--out-dir", str(models), "--traits", "EXT,NEU", "-q"]
        )
        assert code == EXIT_OK
        assert sorted(p.name for p in models.iterdir()) == ["EXT.model", "NEU.model"]
        assert load_model(models / "EXT.model").trait == "EXT"

        capsys.readouterr()
        assert main(["predict", "--model", str(models / "EXT.model"), "--features", str(features)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("# config=")
        assert lines[1] == "id\ttrait\tlabel\tmargin"
        rows = [line.split("\t") for line in lines[2:]]
        assert len(rows) == 60
        assert rows[0][:2] == ["doc0001", "EXT"]
        assert {row[2] for row in rows} <= {"yes", "no"}

        ranking = tmp_path / "ranking"
        code = main(
            [
                "rank-features", "--features", str(features), "--essays", essays,
                "--out-dir", str(ranking), "--top-k", "3", "--source", "f", "-q",
            ]
        )
        assert code == EXIT_OK
        rows = (ranking / "ranking_EXT.tsv").read_text().splitlines()
        assert rows[1] == "trait\trank\tfeature\tgain\tthreshold"
        assert len(rows) == 2 + 3
        assert all(row.split("\t")[2].startswith("fine_emo:") for row in rows[2:])
