from __future__ import annotations

import random

import pytest

from mrc_backend.records import QARecord
from mrc_backend.training import Reader, TrainConfig, train

COLOR_QUERY = "find all color entities in the context."
SHAPE_QUERY = "find all shape entities in the context."
COLORS = ("red", "blue", "green", "teal", "pink", "gray")
FILLERS = ("box", "cat", "jar", "cup")


def make_records(n: int = 80, seed: int = 0) -> list[QARecord]:
    rng = random.Random(seed)
    records = []
    for i in range(n):
        color = rng.choice(COLORS)
        filler = rng.choice(FILLERS)
        context = f"the {color} {filler} sits here"
        records.append(QARecord(f"pos{i}", 1, COLOR_QUERY, context,
                                ((4, 4 + len(color)),)))
        records.append(QARecord(f"neg{i}", 1, SHAPE_QUERY, context, ()))
    return records


@pytest.fixture(scope="session")
def trained_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("artifact")
    cfg = TrainConfig(base_model="builtin:tiny", epochs=25, lr=5e-3,
                      seed=1, batch_size=32)
    train(make_records(), cfg, out)
    return out


@pytest.fixture(scope="session")
def reader(trained_dir) -> Reader:
    return Reader.load(trained_dir)
