"""Span-based document model shared by the whole toolkit.

Offsets are Unicode code points into the note text, never bytes.  A span is
an ordered tuple of non-overlapping (start, end) fragments, so discontinuous
annotations are first-class citizens.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

Fragment = tuple[int, int]


@dataclass(frozen=True, order=True)
class Span:
    fragments: tuple[Fragment, ...]

    def __post_init__(self):
        if not self.fragments:
            raise ValueError("a span needs at least one fragment")
        prev_end = -1
        for start, end in self.fragments:
            if start < 0 or start >= end:
                raise ValueError(f"bad fragment ({start}, {end})")
            if start < prev_end:
                raise ValueError("fragments must be sorted and non-overlapping")
            prev_end = end

    @classmethod
    def contiguous(cls, start: int, end: int) -> "Span":
        return cls(((start, end),))

    @property
    def start(self) -> int:
        return self.fragments[0][0]

    @property
    def end(self) -> int:
        return self.fragments[-1][1]

    @property
    def is_contiguous(self) -> bool:
        return len(self.fragments) == 1

    def extract(self, text: str) -> str:
        """Surface form: fragment slices joined by a single space."""
        return " ".join(text[s:e] for s, e in self.fragments)

    def in_bounds(self, length: int) -> bool:
        return self.end <= length

    def within(self, lo: int, hi: int) -> bool:
        return lo <= self.start and self.end <= hi

    def shift(self, delta: int) -> "Span":
        return Span(tuple((s + delta, e + delta) for s, e in self.fragments))


@dataclass(frozen=True)
class EntityAnnotation:
    id: str
    etype: str
    span: Span
    surface: str

    def key(self) -> tuple:
        """Exact-match identity: span fragments plus type."""
        return (self.fragments, self.etype)

    @property
    def fragments(self) -> tuple[Fragment, ...]:
        return self.span.fragments


@dataclass(frozen=True)
class FrameElementInstance:
    element: str
    anchor_id: str
    filler_id: str


@dataclass
class Document:
    doc_id: str
    text: str
    entities: list[EntityAnnotation] = field(default_factory=list)
    elements: list[FrameElementInstance] = field(default_factory=list)

    def entity_map(self) -> dict[str, EntityAnnotation]:
        return {e.id: e for e in self.entities}

    def resolve(self, inst: FrameElementInstance) -> tuple[EntityAnnotation, EntityAnnotation]:
        emap = self.entity_map()
        return emap[inst.anchor_id], emap[inst.filler_id]

    def entity_keys(self) -> set[tuple]:
        return {e.key() for e in self.entities}

    def element_keys(self, include_filler_type: bool = True) -> set[tuple]:
        """Content identity of frame element instances with references resolved."""
        emap = self.entity_map()
        keys = set()
        for inst in self.elements:
            anchor = emap[inst.anchor_id]
            filler = emap[inst.filler_id]
            filler_key = filler.key() if include_filler_type else filler.fragments
            keys.add((inst.element, anchor.key(), filler_key))
        return keys

    def canonicalized(self) -> "Document":
        """Copy with entities in (start, end, type) order, ids renumbered T1..Tn,
        and element references remapped accordingly."""
        ordered = sorted(self.entities, key=lambda e: (e.span.start, e.span.end, e.etype, e.fragments))
        id_map = {}
        new_entities = []
        for i, ent in enumerate(ordered, start=1):
            new_id = f"T{i}"
            id_map[ent.id] = new_id
            new_entities.append(replace(ent, id=new_id))
        emap = self.entity_map()
        def elem_sort_key(inst: FrameElementInstance):
            anchor, filler = emap[inst.anchor_id], emap[inst.filler_id]
            return (inst.element, anchor.span.start, anchor.span.end, filler.span.start, filler.span.end)
        new_elements = [
            FrameElementInstance(inst.element, id_map[inst.anchor_id], id_map[inst.filler_id])
            for inst in sorted(self.elements, key=elem_sort_key)
        ]
        return Document(self.doc_id, self.text, new_entities, new_elements)


def same_content(a: Document, b: Document) -> bool:
    """Equality up to annotation identifiers and ordering."""
    if (a.doc_id, a.text) != (b.doc_id, b.text):
        return False
    a_entities = {(e.fragments, e.etype, e.surface) for e in a.entities}
    b_entities = {(e.fragments, e.etype, e.surface) for e in b.entities}
    if a_entities != b_entities:
        return False
    return a.element_keys() == b.element_keys()


@dataclass
class Corpus:
    documents: list[Document]
    second_layer: list[Document] | None = None

    def __post_init__(self):
        ids = [d.doc_id for d in self.documents]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate doc_id in corpus")

    def __len__(self) -> int:
        return len(self.documents)

    def by_id(self) -> dict[str, Document]:
        return {d.doc_id: d for d in self.documents}
