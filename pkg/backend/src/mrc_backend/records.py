"""Reading exported question-answering records and encoding them as model
inputs.

Record lines are newline-delimited JSON with at least {record_id, turn,
query, context, answers_context: [{start, end}]}; `answers_context` extents
are code points into the `context` string.  Inputs follow the
[CLS] query [SEP] context [SEP] layout with segment ids 0/1; answer labels
are multi-hot start/end vectors over context token positions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .tokenizer import CLS, SEP, Token, Vocab, tokenize


class SequenceOverflow(Exception):
    """The query alone does not fit the sequence budget."""


class EmptyTrainingSet(Exception):
    pass


@dataclass(frozen=True)
class QARecord:
    record_id: str
    turn: int
    query: str
    context: str
    answers: tuple[tuple[int, int], ...]  # context-relative code points


def load_records(path: str | Path) -> list[QARecord]:
    records: list[QARecord] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            answers = tuple(
                (a["start"], a["end"]) for a in obj.get("answers_context", []))
            records.append(QARecord(
                record_id=obj["record_id"],
                turn=int(obj.get("turn", 1)),
                query=obj["query"],
                context=obj["context"],
                answers=answers,
            ))
    if not records:
        raise EmptyTrainingSet(f"no records in {path}")
    return records


@dataclass
class Encoded:
    record_id: str
    ids: list[int]
    segments: list[int]
    context_tokens: list[Token]     # offsets into the original context string
    context_slot: tuple[int, int]   # [lo, hi) positions of context tokens in ids
    start_labels: list[int] = field(default_factory=list)
    end_labels: list[int] = field(default_factory=list)
    has_answer: bool = False


def encode(query: str, context: str, vocab: Vocab, max_len: int,
           answers: tuple[tuple[int, int], ...] = (),
           record_id: str = "") -> Encoded:
    query_tokens = tokenize(query)
    budget = max_len - len(query_tokens) - 3
    if budget < 1:
        raise SequenceOverflow(
            f"query of {len(query_tokens)} tokens leaves no room for context "
            f"at max_len={max_len}")
    context_tokens = tokenize(context)[:budget]

    ids = [vocab.id(CLS)]
    segments = [0]
    for token in query_tokens:
        ids.append(vocab.id(token.text))
        segments.append(0)
    ids.append(vocab.id(SEP))
    segments.append(0)
    slot_lo = len(ids)
    for token in context_tokens:
        ids.append(vocab.id(token.text))
        segments.append(1)
    slot_hi = len(ids)
    ids.append(vocab.id(SEP))
    segments.append(1)

    starts = [0] * len(context_tokens)
    ends = [0] * len(context_tokens)
    has_answer = False
    for a_start, a_end in answers:
        i = j = None
        for t, token in enumerate(context_tokens):
            if token.start <= a_start < token.end:
                i = t
            if token.start < a_end <= token.end:
                j = t
        if i is None or j is None or j < i:
            continue  # answer truncated away or off token boundaries
        starts[i] = 1
        ends[j] = 1
        has_answer = True

    return Encoded(record_id, ids, segments, context_tokens,
                   (slot_lo, slot_hi), starts, ends, has_answer)
