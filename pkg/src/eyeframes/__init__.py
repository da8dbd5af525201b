"""Frame-semantic spatial annotation toolkit for ophthalmology notes."""

__version__ = "0.1.0"

from .model import Corpus, Document, EntityAnnotation, FrameElementInstance, Span
from .schema import (
    AnchorKind,
    AttachmentMap,
    EntityType,
    FrameElementType,
    Violation,
    load_attachment_map,
    parse_element_type,
    parse_entity_type,
    validate_annotation_set,
)

__all__ = [
    "AnchorKind",
    "AttachmentMap",
    "Corpus",
    "Document",
    "EntityAnnotation",
    "EntityType",
    "FrameElementInstance",
    "FrameElementType",
    "Span",
    "Violation",
    "load_attachment_map",
    "parse_element_type",
    "parse_entity_type",
    "validate_annotation_set",
]
