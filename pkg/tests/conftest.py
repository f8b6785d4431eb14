import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from textsiege.lexicon import EmbeddingStore, SynonymTable
from textsiege.victim import BowVictim, train_bow_victim

import numpy as np


@pytest.fixture()
def two_doc_nb() -> BowVictim:
    """NB trained on {"good movie": 1, "bad movie": 0}; all posteriors in the
    tests against it are hand-computed with Laplace alpha=1."""
    return BowVictim(
        train_bow_victim([("good movie", 1), ("bad movie", 0)], "naive_bayes")
    )


@pytest.fixture()
def review_nb() -> BowVictim:
    data = [
        ("good movie fine story", 1),
        ("bad movie poor story", 0),
        ("good film great plot", 1),
        ("bad film awful plot", 0),
        ("great acting good pacing", 1),
        ("awful acting poor pacing", 0),
    ]
    return BowVictim(train_bow_victim(data, "naive_bayes"))


@pytest.fixture()
def line_store() -> EmbeddingStore:
    """Words on a line: a=(0,0), b=(1,0), c=(3,0)."""
    return EmbeddingStore(
        {
            "a": np.array([0.0, 0.0]),
            "b": np.array([1.0, 0.0]),
            "c": np.array([3.0, 0.0]),
        }
    )


@pytest.fixture()
def small_synonyms() -> SynonymTable:
    return SynonymTable({"good": ["fine", "great"], "movie": ["film"]})
