"""Standoff annotation IO.

Entity lines:   T<id>\t<Type> <start> <end>[;<start> <end>]*\t<surface>
Relation lines: R<id>\t<Element> Arg1:T<anchor> Arg2:T<filler>
Offsets are Unicode code points into the paired text file, taken exactly as
stored (no newline normalization).  Event (E) and attribute (A) lines are
out of scope and rejected.  Lines starting with '#' are annotator notes and
are skipped.

The alternative container is newline-delimited JSON, one document per line:
{"doc_id": ..., "text": ..., "entities": [{"id", "type", "fragments":
[{"start", "end"}], "surface"}], "elements": [{"element", "anchor_id",
"filler_id"}]}.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

from .errors import DanglingReference, MalformedLine, SpanOutOfBounds, SurfaceMismatch
from .model import Corpus, Document, EntityAnnotation, FrameElementInstance, Span
from .schema import canonical_element_name, canonical_entity_name

_T_LINE = re.compile(r"^(T[^\t]+)\t(\S+) (\d+ \d+(?:;\d+ \d+)*)\t(.*)$")
_R_LINE = re.compile(r"^(R[^\t]+)\t(\S+) Arg1:(\S+) Arg2:(\S+)\s*$")


def parse_brat(txt: str, ann: str, doc_id: str = "doc") -> Document:
    entities: list[EntityAnnotation] = []
    elements: list[FrameElementInstance] = []
    seen_ids: set[str] = set()
    pending_relations: list[tuple[int, str, str, str]] = []

    for line_no, raw in enumerate(ann.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            continue
        if line.startswith("T"):
            m = _T_LINE.match(line)
            if m is None:
                raise MalformedLine(f"unparsable entity line {line!r}", line_no)
            tid, type_name, offsets, surface = m.groups()
            if tid in seen_ids:
                raise MalformedLine(f"duplicate annotation id {tid}", line_no)
            seen_ids.add(tid)
            fragments = []
            for pair in offsets.split(";"):
                start_s, end_s = pair.split(" ")
                fragments.append((int(start_s), int(end_s)))
            try:
                span = Span(tuple(fragments))
            except ValueError as exc:
                raise MalformedLine(str(exc), line_no) from exc
            if not span.in_bounds(len(txt)):
                raise SpanOutOfBounds(
                    f"span ends at {span.end} but text has {len(txt)} code points",
                    line_no)
            expected = span.extract(txt)
            if surface != expected:
                raise SurfaceMismatch(
                    f"annotated surface {surface!r} != text slice {expected!r}",
                    line_no)
            entities.append(EntityAnnotation(
                tid, canonical_entity_name(type_name), span, surface))
        elif line.startswith("R"):
            m = _R_LINE.match(line)
            if m is None:
                raise MalformedLine(f"unparsable relation line {line!r}", line_no)
            _rid, element, anchor_id, filler_id = m.groups()
            pending_relations.append((line_no, element, anchor_id, filler_id))
        else:
            raise MalformedLine(f"unsupported annotation line {line!r}", line_no)

    for line_no, element, anchor_id, filler_id in pending_relations:
        for ref in (anchor_id, filler_id):
            if ref not in seen_ids:
                raise DanglingReference(f"unknown annotation id {ref}", line_no)
        elements.append(FrameElementInstance(
            canonical_element_name(element), anchor_id, filler_id))

    return Document(doc_id, txt, entities, elements)


def emit_brat(doc: Document) -> tuple[str, str]:
    """Canonical emission: T lines sorted by (start, end, type), then R lines
    sorted by (element, anchor span, filler span).  Ids are preserved, so
    parse(emit(doc)) reconstructs an equal document."""
    lines: list[str] = []
    ordered = sorted(doc.entities, key=lambda e: (e.span.start, e.span.end, e.etype, e.fragments))
    for ent in ordered:
        offsets = ";".join(f"{s} {e}" for s, e in ent.fragments)
        surface = ent.span.extract(doc.text)
        if "\n" in surface:
            raise ValueError(f"{ent.id}: span text contains a newline; split the fragment")
        lines.append(f"{ent.id}\t{ent.etype} {offsets}\t{surface}")
    emap = doc.entity_map()

    def relation_key(inst: FrameElementInstance):
        anchor, filler = emap[inst.anchor_id], emap[inst.filler_id]
        return (inst.element, anchor.fragments, filler.fragments)

    for i, inst in enumerate(sorted(doc.elements, key=relation_key), start=1):
        lines.append(f"R{i}\t{inst.element} Arg1:{inst.anchor_id} Arg2:{inst.filler_id}")
    ann = "\n".join(lines) + ("\n" if lines else "")
    return doc.text, ann


# --- directory and JSONL containers ------------------------------------------

def read_brat_dir(path: str | Path) -> Corpus:
    """Paired <doc_id>.txt / <doc_id>.ann files; a missing .ann means an
    unannotated note."""
    root = Path(path)
    documents = []
    for txt_path in sorted(root.glob("*.txt")):
        ann_path = txt_path.with_suffix(".ann")
        # newline="" keeps offsets honest: no newline translation on read
        with open(txt_path, encoding="utf-8", newline="") as fh:
            txt = fh.read()
        ann = ""
        if ann_path.exists():
            with open(ann_path, encoding="utf-8", newline="") as fh:
                ann = fh.read()
        documents.append(parse_brat(txt, ann, doc_id=txt_path.stem))
    return Corpus(documents)


def write_brat_dir(corpus: Corpus | list[Document], path: str | Path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    documents = corpus.documents if isinstance(corpus, Corpus) else corpus
    for doc in documents:
        txt, ann = emit_brat(doc)
        with open(root / f"{doc.doc_id}.txt", "w", encoding="utf-8", newline="") as fh:
            fh.write(txt)
        with open(root / f"{doc.doc_id}.ann", "w", encoding="utf-8", newline="") as fh:
            fh.write(ann)


def document_to_obj(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "text": doc.text,
        "entities": [
            {
                "id": e.id,
                "type": e.etype,
                "fragments": [{"start": s, "end": t} for s, t in e.fragments],
                "surface": e.surface,
            }
            for e in doc.entities
        ],
        "elements": [
            {"element": i.element, "anchor_id": i.anchor_id, "filler_id": i.filler_id}
            for i in doc.elements
        ],
    }


def document_from_obj(obj: dict) -> Document:
    entities = [
        EntityAnnotation(
            e["id"], e["type"],
            Span(tuple((f["start"], f["end"]) for f in e["fragments"])),
            e["surface"])
        for e in obj["entities"]
    ]
    elements = [
        FrameElementInstance(i["element"], i["anchor_id"], i["filler_id"])
        for i in obj["elements"]
    ]
    return Document(obj["doc_id"], obj["text"], entities, elements)


def read_jsonl_corpus(path: str | Path) -> Corpus:
    documents = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                documents.append(document_from_obj(json.loads(line)))
    return Corpus(documents)


def write_jsonl_corpus(corpus: Corpus | list[Document], path: str | Path) -> None:
    documents = corpus.documents if isinstance(corpus, Corpus) else corpus
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps(document_to_obj(doc), ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> Corpus:
    """Directory of standoff pairs, or a .jsonl container file."""
    p = Path(path)
    if p.is_dir():
        return read_brat_dir(p)
    return read_jsonl_corpus(p)
