"""Pairwise inter-annotator agreement as exact-match F1.

Layer A is the reference: precision is computed against layer B's
annotations, recall against layer A's.  Entities match on (span fragments,
type); frame elements match on (element type, anchor span+type, filler
span+type).  Both micro and macro aggregates are reported because "overall"
agreement is ambiguous between the two.
"""
from __future__ import annotations

from .errors import TextMismatch
from .evaluation import ENTITY_GROUP, MetricsReport, _tally, element_items, entity_items
from .model import Corpus, Document
from .schema import element_group


def _layer_docs(layer: Corpus | list[Document]) -> list[Document]:
    return layer.documents if isinstance(layer, Corpus) else list(layer)


def agreement_f1(layer_a: Corpus | list[Document],
                 layer_b: Corpus | list[Document]) -> MetricsReport:
    docs_a = _layer_docs(layer_a)
    docs_b = _layer_docs(layer_b)
    b_by_id = {d.doc_id: d for d in docs_b}
    if set(b_by_id) != {d.doc_id for d in docs_a}:
        raise TextMismatch("<layers cover different documents>")
    for doc_a in docs_a:
        if b_by_id[doc_a.doc_id].text != doc_a.text:
            raise TextMismatch(doc_a.doc_id)

    ref_entities, ref_elements = [], []
    other_entities, other_elements = [], []
    for doc in docs_a:
        ref_entities.extend(entity_items(doc))
        ref_elements.extend(element_items(doc, "strict", include_filler_type=True))
    for doc in docs_b:
        other_entities.extend(entity_items(doc))
        other_elements.extend(element_items(doc, "strict", include_filler_type=True))

    # precision side is layer B, recall side is layer A
    entity_rows = _tally(other_entities, ref_entities, lambda _label: ENTITY_GROUP)
    element_rows = _tally(other_elements, ref_elements, element_group)
    return MetricsReport(entity_rows + element_rows, matching="agreement")
