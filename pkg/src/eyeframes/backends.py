"""Machine-reading backend contract and implementations.

A backend answers batches of (id, query, context) items with zero or more
answer spans per item, offsets in code points of the submitted context.  The
gateway validates every response before it reaches callers: ids must be a
permutation of the request ids and every span must satisfy its own
invariants.  Spans that are internally consistent but reach past the end of
the context can optionally be dropped (with a log line) instead of failing
the batch; the extraction pipeline uses that mode so one stray span does not
sink a document.

Wire protocol (remote backends):
    POST /v1/answers   {"items": [{"id", "query", "context"}]}
      -> 200 {"items": [{"id", "answers": [{"start", "end", "text", "score"}]}]}
      -> 503 while unavailable
    GET  /v1/health    -> {"status": "ok"}
"""
from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Protocol

import requests

from .errors import (
    BackendTimeout,
    BackendUnavailable,
    MalformedResponse,
    UnparsableQuery,
)
from .model import Document, EntityAnnotation, Span
from .queries import (
    QueryTemplates,
    TURN1_TEMPLATE,
    TURN2_CLAUSE,
    find_markers,
    get_default_templates,
    make_turn1_query,
    map_span_into_marked,
    strip_markers,
)
from .schema import (
    ENTITY_TYPE_NAMES,
    AttachmentMap,
    anchor_kind_of,
    get_default_attachment_map,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnswerSpan:
    start: int
    end: int
    text: str
    score: float


@dataclass(frozen=True)
class QAItem:
    id: str
    query: str
    context: str


@dataclass(frozen=True)
class QAAnswers:
    id: str
    answers: tuple[AnswerSpan, ...]


class Backend(Protocol):
    name: str

    def answer(self, items: list[QAItem]) -> list[QAAnswers]: ...


def _span_problem(span: AnswerSpan, context: str) -> tuple[bool, str] | None:
    """(fatal, message) for an invalid span; None when valid.  Only spans that
    are internally sound but reach past the context edge are non-fatal."""
    if not isinstance(span.start, int) or not isinstance(span.end, int) \
            or isinstance(span.start, bool) or isinstance(span.end, bool):
        return True, "offsets must be integers"
    if span.start < 0 or span.start >= span.end:
        return True, f"bad extent ({span.start}, {span.end})"
    if not isinstance(span.score, (int, float)) or not 0.0 <= span.score <= 1.0:
        return True, f"score {span.score!r} outside [0, 1]"
    if span.end > len(context):
        return False, "span reaches past the end of the context"
    if span.text != context[span.start:span.end]:
        return True, "text does not equal the context slice"
    return None


def answer_batch(backend: Backend, items: list[QAItem],
                 drop_invalid_spans: bool = False,
                 min_score: float = 0.0) -> list[QAAnswers]:
    """Submit one batch and validate the response.

    Returns answers in request order.  Structural problems (missing or
    duplicated ids, inverted extents) always raise MalformedResponse; spans
    that fail their own invariants are either fatal or dropped-and-logged
    depending on drop_invalid_spans.
    """
    if not items:
        raise ValueError("empty batch")
    for item in items:
        if not item.context:
            raise ValueError(f"item {item.id!r} has an empty context")
    ids = [item.id for item in items]
    if len(set(ids)) != len(ids):
        raise ValueError("request ids must be unique within a batch")

    raw = backend.answer(items)
    by_id = {}
    for resp in raw:
        if resp.id in by_id:
            raise MalformedResponse(f"id {resp.id!r} answered twice")
        by_id[resp.id] = resp
    if set(by_id) != set(ids):
        raise MalformedResponse("response ids are not a permutation of request ids")

    context_of = {item.id: item.context for item in items}
    out: list[QAAnswers] = []
    for item_id in ids:
        context = context_of[item_id]
        kept: list[AnswerSpan] = []
        for span in by_id[item_id].answers:
            problem = _span_problem(span, context)
            if problem is not None:
                fatal, message = problem
                if drop_invalid_spans and not fatal:
                    log.warning("dropping invalid span for %s: %s", item_id, message)
                    continue
                raise MalformedResponse(f"item {item_id!r}: {message}")
            if span.score >= min_score:
                kept.append(span)
        out.append(QAAnswers(item_id, tuple(kept)))
    return out


# --- gold oracle ---------------------------------------------------------------

class OracleBackend:
    """Answers toolkit-generated queries from a gold document, for testing.

    Turn-1 queries are inverted by exact template lookup; turn-2 queries by
    peeling the element description, relation clause, and anchor surface.
    Answers are exactly the gold spans that fall inside the submitted
    context, scored 1.0.  Contexts are located by their first occurrence in
    the gold text; marker tokens, when present, pin the anchor occurrence.
    """

    name = "oracle"

    def __init__(self, gold: Document,
                 templates: QueryTemplates | None = None,
                 attachment: AttachmentMap | None = None):
        self.gold = gold
        self.templates = templates or get_default_templates()
        self.attachment = attachment or get_default_attachment_map()
        self._turn1 = {
            make_turn1_query(etype, self.templates): etype
            for etype in ENTITY_TYPE_NAMES
        }
        # element -> (query prefix up to the anchor-type phrase)
        self._turn2_prefixes = {}
        for element, description in self.templates.element_descriptions.items():
            clause_head = TURN2_CLAUSE.format(
                answer_type=self.templates.answer_type_phrases[element],
                relation=self.templates.element_phrases[element],
                anchor_type="\x00", surface="\x00").split("\x00")[0]
            self._turn2_prefixes[element] = f"{description} {clause_head}"
        # longest first so "clinical finding" wins over a bare prefix
        self._anchor_phrases = sorted(
            {phrase: [t for t, p in self.templates.anchor_type_phrases.items() if p == phrase]
             for phrase in set(self.templates.anchor_type_phrases.values())}.items(),
            key=lambda kv: -len(kv[0]))

    def answer(self, items: list[QAItem]) -> list[QAAnswers]:
        return [QAAnswers(item.id, self._answer_one(item)) for item in items]

    # -- internals --

    def _locate(self, context: str) -> tuple[int, str, tuple[int, int] | None]:
        marked = find_markers(context)
        raw = strip_markers(context) if marked is not None else context
        offset = self.gold.text.find(raw)
        if offset < 0:
            raise ValueError("context is not a window of the oracle's document")
        return offset, raw, marked

    def _answer_one(self, item: QAItem) -> tuple[AnswerSpan, ...]:
        if item.query in self._turn1:
            return self._answer_turn1(item, self._turn1[item.query])
        return self._answer_turn2(item)

    def _gold_spans_to_answers(self, spans: list[Span], offset: int, raw: str,
                               marked: tuple[int, int] | None,
                               context: str) -> tuple[AnswerSpan, ...]:
        rel: list[tuple[int, int]] = []
        hi = offset + len(raw)
        for span in spans:
            if not span.is_contiguous or not span.within(offset, hi):
                continue
            pair = (span.start - offset, span.end - offset)
            if marked is not None:
                pair = map_span_into_marked(pair[0], pair[1], marked)
            rel.append(pair)
        rel = sorted(set(rel))
        return tuple(AnswerSpan(s, e, context[s:e], 1.0) for s, e in rel)

    def _answer_turn1(self, item: QAItem, etype: str) -> tuple[AnswerSpan, ...]:
        offset, raw, marked = self._locate(item.context)
        spans = [ent.span for ent in self.gold.entities if ent.etype == etype]
        return self._gold_spans_to_answers(spans, offset, raw, marked, item.context)

    def _parse_turn2(self, query: str) -> tuple[str, str, list[str]]:
        for element, prefix in self._turn2_prefixes.items():
            if not query.startswith(prefix):
                continue
            remainder = query[len(prefix):]
            for phrase, etypes in self._anchor_phrases:
                head = f"{phrase} entity "
                if remainder.startswith(head) and remainder.endswith("."):
                    surface = remainder[len(head):-1]
                    return element, surface, etypes
        raise UnparsableQuery(f"not a query produced by these templates: {query[:80]!r}...")

    def _answer_turn2(self, item: QAItem) -> tuple[AnswerSpan, ...]:
        element, surface, anchor_types = self._parse_turn2(item.query)
        offset, raw, marked = self._locate(item.context)
        hi = offset + len(raw)

        anchors: list[EntityAnnotation]
        if marked is not None:
            doc_span = (marked[0] + offset, marked[1] + offset)
            anchors = [
                ent for ent in self.gold.entities
                if ent.fragments == (doc_span,) and ent.etype in anchor_types
            ]
        else:
            anchors = [
                ent for ent in self.gold.entities
                if ent.etype in anchor_types and ent.surface == surface
                and ent.span.within(offset, hi)
                and anchor_kind_of(ent.etype) is not None
            ]
        anchor_ids = {ent.id for ent in anchors}
        emap = self.gold.entity_map()
        spans = [
            emap[inst.filler_id].span
            for inst in self.gold.elements
            if inst.element == element and inst.anchor_id in anchor_ids
        ]
        return self._gold_spans_to_answers(spans, offset, raw, marked, item.context)


# --- remote client ---------------------------------------------------------------

class RemoteBackend:
    """HTTP client for the wire protocol with bounded in-flight batches and
    exponential backoff while the server reports itself unavailable."""

    name = "remote"

    def __init__(self, endpoint: str, timeout: float = 60.0,
                 max_retries: int = 4, backoff: float = 0.25,
                 max_in_flight: int = 4):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self._slots = threading.Semaphore(max_in_flight)

    def health(self) -> bool:
        try:
            resp = requests.get(f"{self.endpoint}/v1/health", timeout=self.timeout)
            return resp.status_code == 200 and resp.json().get("status") == "ok"
        except requests.RequestException:
            return False

    def answer(self, items: list[QAItem]) -> list[QAAnswers]:
        payload = {"items": [{"id": i.id, "query": i.query, "context": i.context}
                             for i in items]}
        ids = [i.id for i in items]
        attempt = 0
        with self._slots:
            while True:
                try:
                    resp = requests.post(f"{self.endpoint}/v1/answers",
                                         json=payload, timeout=self.timeout)
                except requests.Timeout:
                    raise BackendTimeout(ids) from None
                except requests.RequestException as exc:
                    resp = None
                    reason = str(exc)
                if resp is not None and resp.status_code == 200:
                    return _parse_wire_response(resp)
                if resp is not None and resp.status_code != 503:
                    raise MalformedResponse(
                        f"unexpected status {resp.status_code} from backend")
                if resp is not None:
                    reason = "backend replied 503"
                attempt += 1
                if attempt > self.max_retries:
                    raise BackendUnavailable(reason)
                time.sleep(self.backoff * (2 ** (attempt - 1)))


def _parse_wire_response(resp) -> list[QAAnswers]:
    try:
        body = resp.json()
        out = []
        for item in body["items"]:
            answers = tuple(
                AnswerSpan(a["start"], a["end"], a["text"], a["score"])
                for a in item["answers"])
            out.append(QAAnswers(item["id"], answers))
        return out
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedResponse(f"response body does not follow the protocol: {exc}") from exc
