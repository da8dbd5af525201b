from __future__ import annotations

import pytest

from eyeframes.errors import SizeMismatch
from eyeframes.model import Corpus, Document
from eyeframes.split import split_corpus


def _corpus(n):
    return Corpus([Document(f"n{i:03d}", f"text {i}", [], []) for i in range(n)])


def test_partition_sizes_exact():
    train, dev, test = split_corpus(_corpus(600), seed=13, sizes=(450, 50, 100))
    assert (len(train), len(dev), len(test)) == (450, 50, 100)
    ids = [d.doc_id for part in (train, dev, test) for d in part.documents]
    assert len(set(ids)) == 600


def test_same_seed_same_partition():
    corpus = _corpus(60)
    first = split_corpus(corpus, seed=13, sizes=(40, 10, 10))
    second = split_corpus(corpus, seed=13, sizes=(40, 10, 10))
    for a, b in zip(first, second):
        assert [d.doc_id for d in a.documents] == [d.doc_id for d in b.documents]


def test_different_seed_differs():
    corpus = _corpus(60)
    a = split_corpus(corpus, seed=13, sizes=(40, 10, 10))
    b = split_corpus(corpus, seed=14, sizes=(40, 10, 10))
    assert [d.doc_id for d in a[0].documents] != [d.doc_id for d in b[0].documents]


def test_size_mismatch():
    with pytest.raises(SizeMismatch):
        split_corpus(_corpus(2), seed=1, sizes=(1, 1, 1))
    with pytest.raises(SizeMismatch):
        split_corpus(_corpus(4), seed=1, sizes=(2, -1, 3))
