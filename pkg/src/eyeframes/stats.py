"""Corpus descriptive statistics: note and sentence lengths, per-type
annotation counts, distinct spatial trigger surfaces."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpus
from .model import Corpus
from .schema import EntityType
from .tokenization import sentence_spans, tokenize


@dataclass
class CorpusStats:
    note_count: int
    avg_note_tokens: float
    avg_sentence_tokens: float
    unique_trigger_count: int
    entity_counts: dict[str, int] = field(default_factory=dict)
    element_counts: dict[str, int] = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "note_count": self.note_count,
            "avg_note_tokens": self.avg_note_tokens,
            "avg_sentence_tokens": self.avg_sentence_tokens,
            "unique_trigger_count": self.unique_trigger_count,
            "entity_counts": dict(sorted(self.entity_counts.items())),
            "element_counts": dict(sorted(self.element_counts.items())),
        }


def compute_stats(corpus: Corpus) -> CorpusStats:
    if not corpus.documents:
        raise EmptyCorpus("cannot compute statistics of an empty corpus")
    note_tokens = []
    sentence_tokens = []
    entity_counts: Counter[str] = Counter()
    element_counts: Counter[str] = Counter()
    trigger_surfaces: set[str] = set()
    for doc in corpus.documents:
        note_tokens.append(len(tokenize(doc.text)))
        for s, e in sentence_spans(doc.text):
            sentence_tokens.append(len(tokenize(doc.text[s:e])))
        for ent in doc.entities:
            entity_counts[ent.etype] += 1
            if ent.etype == EntityType.SPATIAL_TRIGGER.value:
                trigger_surfaces.add(ent.surface.casefold())
        for inst in doc.elements:
            element_counts[inst.element] += 1
    avg_note = sum(note_tokens) / len(note_tokens)
    avg_sentence = sum(sentence_tokens) / len(sentence_tokens) if sentence_tokens else 0.0
    return CorpusStats(
        note_count=len(corpus.documents),
        avg_note_tokens=avg_note,
        avg_sentence_tokens=avg_sentence,
        unique_trigger_count=len(trigger_surfaces),
        entity_counts=dict(entity_counts),
        element_counts=dict(element_counts),
    )


def format_stats(stats: CorpusStats) -> str:
    lines = [
        f"notes                 {stats.note_count}",
        f"avg note tokens       {stats.avg_note_tokens:.2f}",
        f"avg sentence tokens   {stats.avg_sentence_tokens:.2f}",
        f"unique triggers       {stats.unique_trigger_count}",
        "",
        "entity counts:",
    ]
    for name, count in sorted(stats.entity_counts.items()):
        lines.append(f"  {name:<22} {count}")
    lines.append("element counts:")
    for name, count in sorted(stats.element_counts.items()):
        lines.append(f"  {name:<22} {count}")
    return "\n".join(lines)
