from __future__ import annotations

import pytest

from eyeframes.model import Corpus, Document, EntityAnnotation, FrameElementInstance, Span


def entity(eid, etype, start, end, text):
    span = Span.contiguous(start, end)
    return EntityAnnotation(eid, etype, span, text[start:end])


@pytest.fixture
def edema_doc():
    """'mild disc edema in the left eye.' with full gold annotation."""
    text = "mild disc edema in the left eye."
    entities = [
        entity("T1", "OtherDescriptor", 0, 4, text),     # mild
        entity("T2", "OtherDescriptor", 5, 9, text),     # disc
        entity("T3", "Finding", 10, 15, text),           # edema
        entity("T4", "SpatialTrigger", 16, 18, text),    # in
        entity("T5", "OtherDescriptor", 23, 27, text),   # left
        entity("T6", "Anatomy", 28, 31, text),           # eye
    ]
    elements = [
        FrameElementInstance("Figure", "T4", "T3"),
        FrameElementInstance("Ground", "T4", "T6"),
        FrameElementInstance("Status", "T3", "T1"),
        FrameElementInstance("SpecificLocation", "T3", "T2"),
        FrameElementInstance("Laterality", "T3", "T5"),
    ]
    return Document("edema", text, entities, elements)


@pytest.fixture
def edema_corpus(edema_doc):
    return Corpus([edema_doc])
