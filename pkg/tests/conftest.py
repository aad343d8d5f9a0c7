from pathlib import Path

import pytest

from patternoie.induction import build_library
from patternoie.ingest import read_annotations, read_parses, read_scheme
from patternoie.model import ParsedSentence, Token, default_scheme

DATA_DIR = Path(__file__).parent / "data"


def make_sentence(sent_id, rows, text=None):
    """rows: (form, pos, head, dep) tuples, 1-based heads."""
    tokens = tuple(
        Token(index=i, form=f, pos=p, head=h, dep=d)
        for i, (f, p, h, d) in enumerate(rows, start=1)
    )
    return ParsedSentence(
        sent_id=sent_id,
        text=text if text is not None else "".join(t.form for t in tokens),
        tokens=tokens,
    )


@pytest.fixture(scope="session")
def scheme():
    return default_scheme()


@pytest.fixture(scope="session")
def fixture_scheme():
    return read_scheme(DATA_DIR / "scheme.json")


@pytest.fixture
def svo_sentence():
    return make_sentence("svo1", [
        ("小明", "nh", 2, "SBV"),
        ("喜欢", "v", 0, "HED"),
        ("音乐", "n", 2, "VOB"),
    ])


@pytest.fixture(scope="session")
def training_samples(fixture_scheme):
    parses = read_parses(DATA_DIR / "train.conllu", fixture_scheme)
    return read_annotations(DATA_DIR / "train_annotations.jsonl", parses)


@pytest.fixture(scope="session")
def training_library(training_samples, fixture_scheme):
    return build_library(training_samples, fixture_scheme)
