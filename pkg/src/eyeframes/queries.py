"""Deterministic query construction for the two extraction turns.

Turn 1 asks for every span of one entity type.  Turn 2 asks, per anchor and
licensed frame element, for the element's filler spans; the query is the
element's description sentence(s) followed by a fixed relation clause that
embeds the anchor surface verbatim.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import MalformedConfig, UnlicensedPair
from .model import Document, EntityAnnotation, Span
from .schema import (
    ELEMENT_TYPE_NAMES,
    ENTITY_TYPE_NAMES,
    AttachmentMap,
    anchor_kind_of,
    get_default_attachment_map,
    parse_element_type,
    parse_entity_type,
)
from .windows import ContextWindow, window_context, windows_containing

TURN1_TEMPLATE = "find all {description} entities in the context."
TURN2_CLAUSE = ("find all {answer_type} entities in the context that have a "
                "{relation} relationship with {anchor_type} entity {surface}.")

# anchor-occurrence markers for the optional disambiguation mode
MARKER_OPEN = "⟦ "   # "⟦ "
MARKER_CLOSE = " ⟧"  # " ⟧"


@dataclass(frozen=True)
class QueryTemplates:
    entity_descriptions: Mapping[str, str]
    element_descriptions: Mapping[str, str]
    element_phrases: Mapping[str, str]
    answer_type_phrases: Mapping[str, str]
    anchor_type_phrases: Mapping[str, str]


def _parse_templates_obj(obj: dict) -> QueryTemplates:
    if not isinstance(obj, dict):
        raise MalformedConfig("template table must be a JSON object")
    fields = {}
    for name, keys in (
        ("entity_descriptions", ENTITY_TYPE_NAMES),
        ("element_descriptions", ELEMENT_TYPE_NAMES),
        ("element_phrases", ELEMENT_TYPE_NAMES),
        ("answer_type_phrases", ELEMENT_TYPE_NAMES),
        ("anchor_type_phrases", ENTITY_TYPE_NAMES),
    ):
        table = obj.get(name)
        if not isinstance(table, dict):
            raise MalformedConfig(f"missing or malformed table {name!r}")
        parser = parse_entity_type if keys is ENTITY_TYPE_NAMES else parse_element_type
        canonical = {parser(k).value: v for k, v in table.items()}
        missing = [k for k in keys if k not in canonical]
        if missing:
            raise MalformedConfig(f"{name} lacks entries for: {', '.join(missing)}")
        fields[name] = canonical
    return QueryTemplates(**fields)


def load_templates(path: str | Path) -> QueryTemplates:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedConfig(f"{path}: {exc}") from exc
    return _parse_templates_obj(obj)


_DEFAULT_TEMPLATES: QueryTemplates | None = None


def get_default_templates() -> QueryTemplates:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        data = resources.files("eyeframes.data").joinpath("query_templates.json")
        _DEFAULT_TEMPLATES = _parse_templates_obj(json.loads(data.read_text(encoding="utf-8")))
    return _DEFAULT_TEMPLATES


def make_turn1_query(etype: str, templates: QueryTemplates | None = None) -> str:
    templates = templates or get_default_templates()
    canonical = parse_entity_type(etype).value
    return TURN1_TEMPLATE.format(description=templates.entity_descriptions[canonical])


def make_turn2_query(element: str, anchor: EntityAnnotation,
                     templates: QueryTemplates | None = None,
                     attachment: AttachmentMap | None = None) -> str:
    templates = templates or get_default_templates()
    attachment = attachment or get_default_attachment_map()
    canonical = parse_element_type(element).value
    kind = anchor_kind_of(anchor.etype)
    if kind is None:
        raise UnlicensedPair(canonical, None)
    if not attachment.is_licensed(kind, canonical):
        raise UnlicensedPair(canonical, kind.value)
    clause = TURN2_CLAUSE.format(
        answer_type=templates.answer_type_phrases[canonical],
        relation=templates.element_phrases[canonical],
        anchor_type=templates.anchor_type_phrases[anchor.etype],
        surface=anchor.surface,
    )
    return f"{templates.element_descriptions[canonical]} {clause}"


# --- question-answering records -----------------------------------------------

@dataclass(frozen=True)
class QARecord:
    record_id: str
    turn: int
    query: str
    context: str
    context_offset: int
    answers: tuple[Span, ...]
    anchor_id: str | None = None

    def to_obj(self) -> dict:
        obj = {
            "record_id": self.record_id,
            "turn": self.turn,
            "query": self.query,
            "context": self.context,
            "context_offset": self.context_offset,
            "answers": [{"start": s.start, "end": s.end} for s in self.answers],
            "answers_context": [
                {"start": s, "end": e} for s, e in self.context_answer_offsets()
            ],
            "anchor_id": self.anchor_id,
        }
        return obj

    def context_answer_offsets(self) -> list[tuple[int, int]]:
        """Answer extents relative to the context string itself, with any
        marker insertions already accounted for."""
        marked = find_markers(self.context)
        out = []
        for span in self.answers:
            rel = (span.start - self.context_offset, span.end - self.context_offset)
            if marked is not None:
                rel = map_span_into_marked(rel[0], rel[1], marked)
            out.append(rel)
        return out


def mark_anchor(context: str, rel_start: int, rel_end: int) -> str:
    """Wrap the anchor occurrence at [rel_start, rel_end) in marker tokens."""
    return (context[:rel_start] + MARKER_OPEN + context[rel_start:rel_end]
            + MARKER_CLOSE + context[rel_end:])


def find_markers(context: str) -> tuple[int, int] | None:
    """(unmarked anchor start, unmarked anchor end) if the context carries
    marker tokens, else None."""
    open_pos = context.find(MARKER_OPEN)
    if open_pos < 0:
        return None
    close_pos = context.find(MARKER_CLOSE, open_pos + len(MARKER_OPEN))
    if close_pos < 0:
        return None
    anchor_start = open_pos
    anchor_end = close_pos - len(MARKER_OPEN)
    return anchor_start, anchor_end


def strip_markers(context: str) -> str:
    marked = find_markers(context)
    if marked is None:
        return context
    open_pos = context.find(MARKER_OPEN)
    close_pos = context.find(MARKER_CLOSE, open_pos + len(MARKER_OPEN))
    return (context[:open_pos]
            + context[open_pos + len(MARKER_OPEN):close_pos]
            + context[close_pos + len(MARKER_CLOSE):])


def map_span_into_marked(start: int, end: int, anchor: tuple[int, int]) -> tuple[int, int]:
    """Map an unmarked-context span into marked-context coordinates.
    `anchor` is the (start, end) of the marked occurrence in unmarked
    coordinates, as returned by find_markers."""
    a, b = anchor
    shift_open = len(MARKER_OPEN)
    shift_both = shift_open + len(MARKER_CLOSE)
    new_start = start if start < a else (start + shift_open if start < b else start + shift_both)
    new_end = end if end <= a else (end + shift_open if end <= b else end + shift_both)
    return new_start, new_end


def map_span_out_of_marked(start: int, end: int, anchor: tuple[int, int]) -> tuple[int, int] | None:
    """Inverse of map_span_into_marked; None for spans that cut across a
    marker token."""
    a, b = anchor
    open_lo, open_hi = a, a + len(MARKER_OPEN)
    close_lo, close_hi = b + len(MARKER_OPEN), b + len(MARKER_OPEN) + len(MARKER_CLOSE)
    for lo, hi in ((open_lo, open_hi), (close_lo, close_hi)):
        if start < hi and end > lo:
            return None
    shift_open = len(MARKER_OPEN)
    shift_both = shift_open + len(MARKER_CLOSE)
    new_start = start if start <= open_lo else (start - shift_open if start <= close_lo else start - shift_both)
    new_end = end if end <= open_lo else (end - shift_open if end <= close_lo else end - shift_both)
    return new_start, new_end


def export_qa_records(doc: Document,
                      templates: QueryTemplates | None = None,
                      attachment: AttachmentMap | None = None,
                      max_tokens: int = 128, overlap: int = 32,
                      markers: bool = False,
                      turns: Iterable[int] = (1, 2)) -> list[QARecord]:
    """Gold-labelled records for both turns.  Discontinuous gold spans have
    no single-extent answer representation and are skipped."""
    templates = templates or get_default_templates()
    attachment = attachment or get_default_attachment_map()
    records: list[QARecord] = []
    base_windows = window_context(doc.text, max_tokens=max_tokens, overlap=overlap)

    if 1 in turns:
        for window in base_windows:
            context = window.slice(doc.text)
            for etype in ENTITY_TYPE_NAMES:
                answers = tuple(
                    ent.span for ent in doc.entities
                    if ent.etype == etype and ent.span.is_contiguous
                    and window.contains(ent.span))
                records.append(QARecord(
                    record_id=f"{doc.doc_id}:t1:{etype}:w{window.index}",
                    turn=1,
                    query=make_turn1_query(etype, templates),
                    context=context,
                    context_offset=window.char_start,
                    answers=answers,
                ))

    if 2 in turns:
        emap = doc.entity_map()
        fillers_by_anchor: dict[tuple[str, str], list[Span]] = {}
        for inst in doc.elements:
            filler = emap[inst.filler_id]
            if filler.span.is_contiguous:
                fillers_by_anchor.setdefault((inst.anchor_id, inst.element), []).append(filler.span)
        for anchor in doc.entities:
            kind = anchor_kind_of(anchor.etype)
            if kind is None or not anchor.span.is_contiguous:
                continue
            anchor_windows = windows_containing(
                window_context(doc.text, anchor.span, max_tokens=max_tokens, overlap=overlap),
                anchor.span)
            for element in attachment.elements_for(kind):
                query = make_turn2_query(element, anchor, templates, attachment)
                for window in anchor_windows:
                    context = window.slice(doc.text)
                    if markers:
                        context = mark_anchor(
                            context,
                            anchor.span.start - window.char_start,
                            anchor.span.end - window.char_start)
                    answers = tuple(
                        span for span in fillers_by_anchor.get((anchor.id, element), [])
                        if window.contains(span))
                    records.append(QARecord(
                        record_id=f"{doc.doc_id}:t2:{element}:{anchor.id}:w{window.index}",
                        turn=2,
                        query=query,
                        context=context,
                        context_offset=window.char_start,
                        answers=answers,
                        anchor_id=anchor.id,
                    ))
    return records


def write_qa_records(records: Iterable[QARecord], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_obj(), ensure_ascii=False) + "\n")
            count += 1
    return count
