"""Type system for spatial frame annotation of ophthalmology notes.

Ten entity types, sixteen spatial frame elements, eight descriptive frame
elements.  Frames are evoked either by a spatial trigger (preposition/verb)
or by a main clinical entity (finding, procedure, drug); the attachment map
records which elements each anchor kind licenses and, optionally, which
entity types may fill them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import MalformedConfig, MissingElement, UnknownTypeError
from .model import Document


class EntityType(str, Enum):
    SPATIAL_TRIGGER = "SpatialTrigger"
    FINDING = "Finding"
    ANATOMY = "Anatomy"
    DEVICE = "Device"
    LOCATION_DESCRIPTOR = "LocationDescriptor"
    OTHER_DESCRIPTOR = "OtherDescriptor"
    ASSERTION = "Assertion"
    QUANTITY = "Quantity"
    DRUG = "Drug"
    PROCEDURE = "Procedure"


class FrameElementType(str, Enum):
    # spatial
    FIGURE = "Figure"
    GROUND = "Ground"
    HEDGE = "Hedge"
    DIAGNOSIS = "Diagnosis"
    RELATIVE_POSITION = "RelativePosition"
    REASON = "Reason"
    MEDICATION = "Medication"
    MORPHOLOGIC = "Morphologic"
    SIZE_DESC = "SizeDesc"
    DISTRIBUTION_PATTERN = "DistributionPattern"
    COMPOSITION = "Composition"
    LATERALITY = "Laterality"
    SIZE = "Size"
    IMPACT_ON_SIDE = "ImpactOnSide"
    DIRECTION = "Direction"
    SPECIFIC_LOCATION = "SpecificLocation"
    # descriptive
    STATUS = "Status"
    QUANTITY = "Quantity"
    TEMPORAL = "Temporal"
    NEGATION = "Negation"
    PATHPHYSIO = "Pathphysio"
    CERTAINTY = "Certainty"
    ASSOCIATED_DIAGNOSIS = "AssociatedDiagnosis"
    VALUE = "Value"


class AnchorKind(str, Enum):
    TRIGGER = "TriggerFrame"
    ENTITY = "EntityFrame"


ENTITY_TYPE_NAMES: tuple[str, ...] = tuple(t.value for t in EntityType)

SPATIAL_ELEMENTS: frozenset[str] = frozenset({
    "Figure", "Ground", "Hedge", "Diagnosis", "RelativePosition", "Reason",
    "Medication", "Morphologic", "SizeDesc", "DistributionPattern",
    "Composition", "Laterality", "Size", "ImpactOnSide", "Direction",
    "SpecificLocation",
})
DESCRIPTIVE_ELEMENTS: frozenset[str] = frozenset({
    "Status", "Quantity", "Temporal", "Negation", "Pathphysio", "Certainty",
    "AssociatedDiagnosis", "Value",
})
ELEMENT_TYPE_NAMES: tuple[str, ...] = tuple(e.value for e in FrameElementType)

# Entity types that evoke a frame of their own.
ENTITY_FRAME_EVOKERS: frozenset[str] = frozenset({"Finding", "Procedure", "Drug"})


def _spaced_variants(name: str) -> set[str]:
    """Spaced alias forms of a CamelCase name, e.g. "Impact on Side"."""
    words = []
    current = ""
    for ch in name:
        if ch.isupper() and current:
            words.append(current)
            current = ch
        else:
            current += ch
    words.append(current)
    if len(words) == 1:
        return set()
    spaced_title = " ".join(words)
    spaced_lower = words[0] + " " + " ".join(w.lower() for w in words[1:])
    mixed = {spaced_title, spaced_lower}
    # forms like "Impact on Side": small connector words stay lowercase
    connectors = {"On", "Of"}
    mixed.add(" ".join(w.lower() if w in connectors else w for w in words))
    return mixed


_ENTITY_ALIASES: dict[str, str] = {}
for _t in ENTITY_TYPE_NAMES:
    _ENTITY_ALIASES[_t] = _t
    for _alias in _spaced_variants(_t):
        _ENTITY_ALIASES[_alias] = _t
        # standoff type names cannot contain spaces; accept underscores there
        _ENTITY_ALIASES[_alias.replace(" ", "_")] = _t

_ELEMENT_ALIASES: dict[str, str] = {}
for _e in ELEMENT_TYPE_NAMES:
    _ELEMENT_ALIASES[_e] = _e
    for _alias in _spaced_variants(_e):
        _ELEMENT_ALIASES[_alias] = _e
        _ELEMENT_ALIASES[_alias.replace(" ", "_")] = _e
# spaced table headings that do not follow the mechanical CamelCase split
_ELEMENT_ALIASES["Size Desc"] = "SizeDesc"
_ELEMENT_ALIASES["Size desc"] = "SizeDesc"
_ELEMENT_ALIASES["Specific location"] = "SpecificLocation"
_ELEMENT_ALIASES["Pathphysio"] = "Pathphysio"


def parse_entity_type(name: str) -> EntityType:
    """Canonical CamelCase names plus documented spaced aliases; everything
    else is rejected (matching is case-sensitive)."""
    try:
        return EntityType(_ENTITY_ALIASES[name])
    except KeyError:
        raise UnknownTypeError(f"unknown entity type {name!r}") from None


def canonical_entity_name(name: str) -> str:
    """Canonical form for known names and aliases; unknown names pass through
    untouched so validation can report them."""
    return _ENTITY_ALIASES.get(name, name)


def canonical_element_name(name: str) -> str:
    return _ELEMENT_ALIASES.get(name, name)


def parse_element_type(name: str) -> FrameElementType:
    try:
        return FrameElementType(_ELEMENT_ALIASES[name])
    except KeyError:
        raise UnknownTypeError(f"unknown frame element type {name!r}") from None


def element_category(element: str | FrameElementType) -> str:
    name = element.value if isinstance(element, FrameElementType) else element
    if name in SPATIAL_ELEMENTS:
        return "Spatial"
    if name in DESCRIPTIVE_ELEMENTS:
        return "Descriptive"
    raise UnknownTypeError(f"unknown frame element type {name!r}")


def anchor_kind_of(etype: str) -> AnchorKind | None:
    """Anchor kind an entity of this type evokes, or None for non-anchors."""
    if etype == EntityType.SPATIAL_TRIGGER.value:
        return AnchorKind.TRIGGER
    if etype in ENTITY_FRAME_EVOKERS:
        return AnchorKind.ENTITY
    return None


@dataclass(frozen=True)
class AttachmentMap:
    """(anchor kind, element) -> allowed filler entity types (None = any)."""

    licensed: dict[tuple[AnchorKind, str], frozenset[str] | None]

    def is_licensed(self, kind: AnchorKind, element: str) -> bool:
        return (kind, element) in self.licensed

    def allowed_fillers(self, kind: AnchorKind, element: str) -> frozenset[str] | None:
        return self.licensed[(kind, element)]

    def elements_for(self, kind: AnchorKind) -> tuple[str, ...]:
        found = [el for (k, el) in self.licensed if k is kind]
        return tuple(sorted(found))

    def anchor_kinds(self, element: str) -> tuple[AnchorKind, ...]:
        return tuple(k for k in AnchorKind if (k, element) in self.licensed)

    def covered_elements(self) -> set[str]:
        return {el for (_k, el) in self.licensed}


def _parse_attachment_obj(obj: dict) -> AttachmentMap:
    if not isinstance(obj, dict):
        raise MalformedConfig("attachment map must be a JSON object")
    licensed: dict[tuple[AnchorKind, str], frozenset[str] | None] = {}
    for kind_name, elements in obj.items():
        if kind_name.startswith("_"):
            continue
        try:
            kind = AnchorKind(kind_name)
        except ValueError:
            raise MalformedConfig(f"unknown anchor kind {kind_name!r}") from None
        if not isinstance(elements, dict):
            raise MalformedConfig(f"{kind_name}: expected an object of elements")
        for element_name, fillers in elements.items():
            element = parse_element_type(element_name).value
            if fillers == "any":
                allowed = None
            elif isinstance(fillers, list):
                allowed = frozenset(parse_entity_type(f).value for f in fillers)
            else:
                raise MalformedConfig(
                    f"{kind_name}.{element_name}: fillers must be \"any\" or a list"
                )
            licensed[(kind, element)] = allowed
    amap = AttachmentMap(licensed)
    for element in ELEMENT_TYPE_NAMES:
        if element not in amap.covered_elements():
            raise MissingElement(element)
    return amap


def load_attachment_map(path: str | Path) -> AttachmentMap:
    """Load an attachment map config; it must cover all 24 element types."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedConfig(f"{path}: {exc}") from exc
    try:
        return _parse_attachment_obj(obj)
    except UnknownTypeError as exc:
        raise MalformedConfig(str(exc)) from exc


def default_attachment_map() -> AttachmentMap:
    data = resources.files("eyeframes.data").joinpath("attachment_map.json")
    return _parse_attachment_obj(json.loads(data.read_text(encoding="utf-8")))


_DEFAULT_MAP: AttachmentMap | None = None


def get_default_attachment_map() -> AttachmentMap:
    global _DEFAULT_MAP
    if _DEFAULT_MAP is None:
        _DEFAULT_MAP = default_attachment_map()
    return _DEFAULT_MAP


def element_group(element: str, amap: AttachmentMap | None = None) -> str:
    """Report grouping tag for a frame element row."""
    amap = amap or get_default_attachment_map()
    kinds = amap.anchor_kinds(element)
    if element_category(element) == "Descriptive":
        return "Desc(entity)"
    if AnchorKind.TRIGGER in kinds:
        return "Spatial(sptr)"
    return "Spatial(entity)"


# --- validation --------------------------------------------------------------

class ViolationCode(str, Enum):
    UNKNOWN_ENTITY_TYPE = "unknown-entity-type"
    UNKNOWN_ELEMENT_TYPE = "unknown-element-type"
    SPAN_OUT_OF_BOUNDS = "span-out-of-bounds"
    SURFACE_MISMATCH = "surface-mismatch"
    DUPLICATE_ANNOTATION = "duplicate-annotation"
    DANGLING_REFERENCE = "dangling-reference"
    SELF_REFERENCE = "self-reference"
    BAD_ANCHOR_TYPE = "bad-anchor-type"
    UNLICENSED_ELEMENT = "unlicensed-element"
    FILLER_TYPE_RESTRICTED = "filler-type-restricted"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    doc_id: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code.value}] {self.doc_id}/{self.subject}: {self.message}"


def validate_annotation_set(doc: Document, amap: AttachmentMap | None = None) -> list[Violation]:
    """All schema violations in a document.  Violations are data, not errors."""
    amap = amap or get_default_attachment_map()
    violations: list[Violation] = []
    length = len(doc.text)
    seen_keys: set[tuple] = set()
    known_entities: dict[str, str] = {}

    for ent in doc.entities:
        known_entities[ent.id] = ent.etype
        try:
            parse_entity_type(ent.etype)
        except UnknownTypeError:
            violations.append(Violation(
                ViolationCode.UNKNOWN_ENTITY_TYPE, doc.doc_id, ent.id,
                f"entity type {ent.etype!r} is not in the schema"))
        if not ent.span.in_bounds(length):
            violations.append(Violation(
                ViolationCode.SPAN_OUT_OF_BOUNDS, doc.doc_id, ent.id,
                f"span ends at {ent.span.end} but text has {length} code points"))
        elif ent.surface != ent.span.extract(doc.text):
            violations.append(Violation(
                ViolationCode.SURFACE_MISMATCH, doc.doc_id, ent.id,
                f"surface {ent.surface!r} != text slice {ent.span.extract(doc.text)!r}"))
        key = (ent.fragments, ent.etype)
        if key in seen_keys:
            violations.append(Violation(
                ViolationCode.DUPLICATE_ANNOTATION, doc.doc_id, ent.id,
                "same span and type annotated twice"))
        seen_keys.add(key)

    for i, inst in enumerate(doc.elements):
        subject = f"element#{i}"
        try:
            parse_element_type(inst.element)
        except UnknownTypeError:
            violations.append(Violation(
                ViolationCode.UNKNOWN_ELEMENT_TYPE, doc.doc_id, subject,
                f"frame element type {inst.element!r} is not in the schema"))
            continue
        missing = [r for r in (inst.anchor_id, inst.filler_id) if r not in known_entities]
        if missing:
            violations.append(Violation(
                ViolationCode.DANGLING_REFERENCE, doc.doc_id, subject,
                f"unresolved entity reference(s): {', '.join(missing)}"))
            continue
        if inst.anchor_id == inst.filler_id:
            violations.append(Violation(
                ViolationCode.SELF_REFERENCE, doc.doc_id, subject,
                f"anchor and filler are both {inst.anchor_id}"))
            continue
        anchor_type = known_entities[inst.anchor_id]
        kind = anchor_kind_of(anchor_type)
        if kind is None:
            violations.append(Violation(
                ViolationCode.BAD_ANCHOR_TYPE, doc.doc_id, subject,
                f"{anchor_type!r} entities do not evoke frames"))
            continue
        if not amap.is_licensed(kind, inst.element):
            violations.append(Violation(
                ViolationCode.UNLICENSED_ELEMENT, doc.doc_id, subject,
                f"{inst.element} is not licensed for {kind.value}"))
            continue
        allowed = amap.allowed_fillers(kind, inst.element)
        filler_type = known_entities[inst.filler_id]
        if allowed is not None and filler_type not in allowed:
            violations.append(Violation(
                ViolationCode.FILLER_TYPE_RESTRICTED, doc.doc_id, subject,
                f"{inst.element} filler may not be of type {filler_type!r}"))

    return violations
