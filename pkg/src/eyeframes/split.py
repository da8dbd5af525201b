"""Deterministic seeded corpus partitioning."""
from __future__ import annotations

import random

from .errors import SizeMismatch
from .model import Corpus


def split_corpus(corpus: Corpus, seed: int,
                 sizes: tuple[int, int, int]) -> tuple[Corpus, Corpus, Corpus]:
    """Shuffle documents with a seeded pseudo-random permutation and cut the
    result into train/dev/test parts of exactly the requested sizes."""
    if any(s < 0 for s in sizes):
        raise SizeMismatch("split sizes must be non-negative")
    if sum(sizes) != len(corpus.documents):
        raise SizeMismatch(
            f"sizes {sizes} sum to {sum(sizes)} but the corpus has "
            f"{len(corpus.documents)} documents")
    order = list(corpus.documents)
    random.Random(seed).shuffle(order)
    train_n, dev_n, _test_n = sizes
    return (
        Corpus(order[:train_n]),
        Corpus(order[train_n:train_n + dev_n]),
        Corpus(order[train_n + dev_n:]),
    )
