"""Two-turn extraction orchestration.

Turn 1 queries every configured entity type over sliding context windows.
Turn 2 queries each anchor (spatial trigger or frame-evoking entity) for its
licensed frame elements over anchor-centered windows, materializing filler
entities for the answers.  Answers whose spans are not fully inside their
window are dropped, never clipped; duplicate predictions from overlapping
windows merge only when their spans are identical.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .backends import Backend, QAItem, answer_batch
from .errors import AnchorTooLong, EyeframesError
from .model import Corpus, Document, EntityAnnotation, FrameElementInstance, Span
from .queries import (
    QueryTemplates,
    get_default_templates,
    make_turn1_query,
    make_turn2_query,
    map_span_out_of_marked,
    mark_anchor,
)
from .schema import (
    ENTITY_TYPE_NAMES,
    AttachmentMap,
    EntityType,
    anchor_kind_of,
    get_default_attachment_map,
    validate_annotation_set,
)
from .tokenization import tokenize
from .windows import window_context, windows_containing

log = logging.getLogger(__name__)

# fallback filler types when a turn-2 answer matches no known entity span
_FILLER_DEFAULTS = {
    "Figure": EntityType.FINDING.value,
    "Ground": EntityType.ANATOMY.value,
}
_FILLER_FALLBACK = EntityType.OTHER_DESCRIPTOR.value


@dataclass(frozen=True)
class ExtractionConfig:
    entity_types_turn1: tuple[str, ...] = ENTITY_TYPE_NAMES
    max_tokens: int = 128
    overlap: int = 32
    anchor_mode: str = "predicted"  # or "gold"
    markers: bool = False
    min_score: float = 0.0
    attachment: AttachmentMap | None = None
    templates: QueryTemplates | None = None

    def __post_init__(self):
        if self.max_tokens <= self.overlap:
            raise ValueError("max_tokens must exceed overlap")
        if self.anchor_mode not in ("predicted", "gold"):
            raise ValueError(f"unknown anchor mode {self.anchor_mode!r}")

    def resolved_attachment(self) -> AttachmentMap:
        return self.attachment or get_default_attachment_map()

    def resolved_templates(self) -> QueryTemplates:
        return self.templates or get_default_templates()


@dataclass(frozen=True)
class Provenance:
    record_id: str
    backend: str
    window: tuple[int, int]
    ambiguous: bool = False


@dataclass
class ExtractionResult:
    doc_id: str
    document: Document | None
    provenance: list[Provenance] = field(default_factory=list)
    error: str | None = None
    error_kind: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def run_turn1(text: str, backend: Backend, config: ExtractionConfig,
              doc_id: str = "doc") -> tuple[list[EntityAnnotation], list[Provenance]]:
    templates = config.resolved_templates()
    tokens = tokenize(text)
    windows = window_context(text, max_tokens=config.max_tokens,
                             overlap=config.overlap, tokens=tokens)
    items: list[QAItem] = []
    meta: dict[str, tuple] = {}
    for window in windows:
        context = window.slice(text)
        for etype in config.entity_types_turn1:
            item_id = f"{doc_id}:t1:{etype}:w{window.index}"
            items.append(QAItem(item_id, make_turn1_query(etype, templates), context))
            meta[item_id] = (window, etype)
    if not items:
        return [], []

    responses = answer_batch(backend, items, drop_invalid_spans=True,
                             min_score=config.min_score)
    merged: dict[tuple, tuple[EntityAnnotation, Provenance]] = {}
    for resp in responses:
        window, etype = meta[resp.id]
        for span in resp.answers:
            if "\n" in span.text:
                # not representable as one standoff fragment, never gold
                log.warning("dropping %s answer spanning a newline", resp.id)
                continue
            doc_span = Span.contiguous(window.char_start + span.start,
                                       window.char_start + span.end)
            key = (doc_span.fragments, etype)
            if key in merged:
                continue
            ent = EntityAnnotation(f"P{len(merged) + 1}", etype, doc_span,
                                   doc_span.extract(text))
            merged[key] = (ent, Provenance(resp.id, backend.name,
                                           (window.char_start, window.char_end)))
    entities = [ent for ent, _ in merged.values()]
    provenance = [prov for _, prov in merged.values()]
    return entities, provenance


def _ambiguous_anchor_ids(anchors: list[EntityAnnotation], text: str,
                          config: ExtractionConfig) -> set[str]:
    """Anchors that share surface and type with another anchor in at least one
    common window; without markers their turn-2 queries are identical."""
    if config.markers:
        return set()
    by_signature: dict[tuple[str, str], list[EntityAnnotation]] = {}
    for anchor in anchors:
        by_signature.setdefault((anchor.etype, anchor.surface), []).append(anchor)
    tokens = tokenize(text)
    ambiguous: set[str] = set()
    for group in by_signature.values():
        if len(group) < 2:
            continue
        extents = []
        for anchor in group:
            try:
                windows = windows_containing(
                    window_context(text, anchor.span, config.max_tokens,
                                   config.overlap, tokens=tokens),
                    anchor.span)
            except AnchorTooLong:
                windows = []
            extents.append({(w.char_start, w.char_end) for w in windows})
        for i, anchor in enumerate(group):
            others = set().union(*(e for j, e in enumerate(extents) if j != i))
            if extents[i] & others:
                ambiguous.add(anchor.id)
    return ambiguous


def run_turn2(text: str, anchors: list[EntityAnnotation], backend: Backend,
              config: ExtractionConfig, doc_id: str = "doc",
              known_entities: list[EntityAnnotation] | None = None,
              ) -> tuple[list[FrameElementInstance], list[EntityAnnotation], list[Provenance]]:
    """Extract licensed frame elements per anchor.  Returns the element
    instances, any filler entities that had to be materialized, and
    per-prediction provenance."""
    templates = config.resolved_templates()
    attachment = config.resolved_attachment()
    tokens = tokenize(text)
    ambiguous_ids = _ambiguous_anchor_ids(anchors, text, config)

    items: list[QAItem] = []
    meta: dict[str, tuple] = {}
    for anchor in anchors:
        kind = anchor_kind_of(anchor.etype)
        if kind is None or not anchor.span.is_contiguous:
            continue
        try:
            anchor_windows = windows_containing(
                window_context(text, anchor.span, config.max_tokens,
                               config.overlap, tokens=tokens),
                anchor.span)
        except AnchorTooLong:
            log.warning("%s: anchor %s exceeds the window budget; skipped",
                        doc_id, anchor.id)
            continue
        for element in attachment.elements_for(kind):
            query = make_turn2_query(element, anchor, templates, attachment)
            for window in anchor_windows:
                context = window.slice(text)
                marked_at = None
                if config.markers:
                    rel = (anchor.span.start - window.char_start,
                           anchor.span.end - window.char_start)
                    context = mark_anchor(context, *rel)
                    marked_at = rel
                item_id = f"{doc_id}:t2:{element}:{anchor.id}:w{window.index}"
                items.append(QAItem(item_id, query, context))
                meta[item_id] = (window, element, anchor, marked_at)
    if not items:
        return [], [], []

    responses = answer_batch(backend, items, drop_invalid_spans=True,
                             min_score=config.min_score)

    # anchors take precedence: document assembly keeps them over duplicate
    # predictions, so fillers must reference the surviving object
    entity_pool: dict[tuple, EntityAnnotation] = {}
    for ent in list(anchors) + list(known_entities or []):
        entity_pool.setdefault(ent.fragments, ent)
    materialized: list[EntityAnnotation] = []
    instances: dict[tuple, tuple[FrameElementInstance, Provenance]] = {}

    for resp in responses:
        window, element, anchor, marked_at = meta[resp.id]
        for span in resp.answers:
            if "\n" in span.text:
                log.warning("dropping %s answer spanning a newline", resp.id)
                continue
            extent = (span.start, span.end)
            if marked_at is not None:
                mapped = map_span_out_of_marked(span.start, span.end, marked_at)
                if mapped is None:
                    log.warning("dropping %s answer overlapping a marker token", resp.id)
                    continue
                extent = mapped
            doc_span = Span.contiguous(window.char_start + extent[0],
                                       window.char_start + extent[1])
            if doc_span.fragments == anchor.fragments:
                # a backend may echo the anchor itself; an element cannot
                # reference its own anchor as filler
                log.warning("dropping %s answer equal to its anchor span", resp.id)
                continue
            filler = entity_pool.get(doc_span.fragments)
            if filler is None:
                ftype = _FILLER_DEFAULTS.get(element, _FILLER_FALLBACK)
                filler = EntityAnnotation(f"F{len(materialized) + 1}", ftype,
                                          doc_span, doc_span.extract(text))
                entity_pool[doc_span.fragments] = filler
                materialized.append(filler)
            key = (element, anchor.id, doc_span.fragments)
            if key in instances:
                continue
            prov = Provenance(resp.id, backend.name,
                              (window.char_start, window.char_end),
                              ambiguous=anchor.id in ambiguous_ids)
            instances[key] = (FrameElementInstance(element, anchor.id, filler.id), prov)

    elements = [inst for inst, _ in instances.values()]
    provenance = [prov for _, prov in instances.values()]
    return elements, materialized, provenance


def extract_document(doc: Document, backend: Backend,
                     config: ExtractionConfig) -> ExtractionResult:
    provenance: list[Provenance] = []
    predicted: list[EntityAnnotation] = []
    if config.entity_types_turn1:
        predicted, prov1 = run_turn1(doc.text, backend, config, doc.doc_id)
        provenance.extend(prov1)

    if config.anchor_mode == "gold":
        anchors = [e for e in doc.entities if anchor_kind_of(e.etype) is not None]
    else:
        anchors = [e for e in predicted if anchor_kind_of(e.etype) is not None]

    elements, fillers, prov2 = run_turn2(
        doc.text, anchors, backend, config, doc.doc_id, known_entities=predicted)
    provenance.extend(prov2)

    # anchors first so element references survive key-level deduplication
    entities: list[EntityAnnotation] = []
    seen: set[tuple] = set()
    for ent in list(anchors) + predicted + fillers:
        if ent.key() in seen:
            continue
        seen.add(ent.key())
        entities.append(ent)

    assembled = Document(doc.doc_id, doc.text, entities, elements).canonicalized()
    violations = validate_annotation_set(assembled, config.resolved_attachment())
    if violations:
        raise RuntimeError(
            f"pipeline produced an invalid document for {doc.doc_id}: "
            + "; ".join(str(v) for v in violations[:5]))
    return ExtractionResult(doc.doc_id, assembled, provenance)


def run_pipeline(corpus: Corpus, backend_factory: Callable[[Document], Backend],
                 config: ExtractionConfig, jobs: int = 1) -> list[ExtractionResult]:
    """Extract every document; failures are isolated per document."""

    def one(doc: Document) -> ExtractionResult:
        try:
            return extract_document(doc, backend_factory(doc), config)
        except EyeframesError as exc:
            return ExtractionResult(doc.doc_id, None, [],
                                    error=str(exc), error_kind=type(exc).__name__)

    if jobs <= 1:
        return [one(doc) for doc in corpus.documents]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, corpus.documents))
