import sys
from pathlib import Path

import pytest

# Add src directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from affectlex.corpus import TRAITS, Document, Label  # noqa: E402
from affectlex.lexicon import LexiconKind, lexicon_from_scores  # noqa: E402

DATA_DIR = Path(__file__).parent.parent / "src" / "affectlex" / "data"

FOUR_TWEETS = [
    "mine all mine #possessive",
    "you are mine #possessive",
    "missing you so much #apart",
    "a tear in the rain #apart #lol",
]

INVENTORY = ["possessive", "apart"]

ESSAY_TABLE = (
    "id,text,cEXT,cNEU,cAGR,cCON,cOPN\n"
    'e1,"I am happy.",y,n,y,n,y\n'
    'e2,"We went home. Then we slept!",n,y,n,y,n\n'
    'e3,"I can\'t wait, really.",y,y,n,n,y\n'
)


def labels(*symbols: str) -> dict[str, Label]:
    """Map five y/n symbols onto the traits in order."""
    return {t: Label.YES if s == "y" else Label.NO for t, s in zip(TRAITS, symbols)}


def doc(tokens, doc_id="d", sentence_count=None, trait_labels=None, punctuation=0):
    """A document built straight from tokens."""
    tokens = tuple(tokens)
    if sentence_count is None:
        sentence_count = 1 if tokens else 0
    return Document(
        id=doc_id,
        tokens=tokens,
        sentence_count=sentence_count,
        raw_char_count=sum(len(t) for t in tokens),
        punctuation_count=punctuation,
        labels=trait_labels,
    )


@pytest.fixture
def tweet_file(tmp_path):
    path = tmp_path / "tweets.txt"
    path.write_text("\n".join(FOUR_TWEETS) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def inventory_file(tmp_path):
    path = tmp_path / "inventory.txt"
    path.write_text("#possessive\n#apart\n", encoding="utf-8")
    return path


@pytest.fixture
def essay_file(tmp_path):
    path = tmp_path / "essays.csv"
    path.write_text(ESSAY_TABLE, encoding="utf-8")
    return path


@pytest.fixture
def excerpt_path():
    return DATA_DIR / "hashtag_excerpt.tsv"


@pytest.fixture
def hashtag_lexicon():
    return lexicon_from_scores(
        LexiconKind.PMI_ASSOCIATION,
        {
            "possessive": {"possessive": 7.228, "lover": 5.213, "mine": 4.141},
            "apart": {"apart": 4.6, "tear": 4.065},
        },
    )
