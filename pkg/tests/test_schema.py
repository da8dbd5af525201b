from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from eyeframes.errors import MalformedConfig, MissingElement, UnknownTypeError
from eyeframes.model import Document, EntityAnnotation, FrameElementInstance, Span
from eyeframes.schema import (
    AnchorKind,
    DESCRIPTIVE_ELEMENTS,
    ELEMENT_TYPE_NAMES,
    ENTITY_TYPE_NAMES,
    SPATIAL_ELEMENTS,
    ViolationCode,
    element_group,
    get_default_attachment_map,
    load_attachment_map,
    parse_element_type,
    parse_entity_type,
    validate_annotation_set,
)

from conftest import entity

ENTITY_ALIASES = {
    "Spatial trigger": "SpatialTrigger",
    "Location descriptor": "LocationDescriptor",
    "Other descriptor": "OtherDescriptor",
}
ELEMENT_ALIASES = {
    "Relative Position": "RelativePosition",
    "Size Desc": "SizeDesc",
    "Distribution Pattern": "DistributionPattern",
    "Impact on Side": "ImpactOnSide",
    "Specific location": "SpecificLocation",
    "Associated Diagnosis": "AssociatedDiagnosis",
}


def test_entity_inventory():
    assert len(ENTITY_TYPE_NAMES) == 10
    assert set(ENTITY_TYPE_NAMES) == {
        "SpatialTrigger", "Finding", "Anatomy", "Device", "LocationDescriptor",
        "OtherDescriptor", "Assertion", "Quantity", "Drug", "Procedure",
    }


def test_element_inventory():
    assert len(SPATIAL_ELEMENTS) == 16
    assert len(DESCRIPTIVE_ELEMENTS) == 8
    assert len(ELEMENT_TYPE_NAMES) == 24
    assert SPATIAL_ELEMENTS.isdisjoint(DESCRIPTIVE_ELEMENTS)
    assert set(SPATIAL_ELEMENTS) == {
        "Figure", "Ground", "Hedge", "Diagnosis", "RelativePosition", "Reason",
        "Medication", "Morphologic", "SizeDesc", "DistributionPattern",
        "Composition", "Laterality", "Size", "ImpactOnSide", "Direction",
        "SpecificLocation",
    }
    assert set(DESCRIPTIVE_ELEMENTS) == {
        "Status", "Quantity", "Temporal", "Negation", "Pathphysio",
        "Certainty", "AssociatedDiagnosis", "Value",
    }


@pytest.mark.parametrize("name", ENTITY_TYPE_NAMES)
def test_canonical_entity_names_parse(name):
    assert parse_entity_type(name).value == name


@pytest.mark.parametrize("alias,canonical", ENTITY_ALIASES.items())
def test_entity_aliases(alias, canonical):
    assert parse_entity_type(alias).value == canonical


@pytest.mark.parametrize("alias,canonical", ELEMENT_ALIASES.items())
def test_element_aliases(alias, canonical):
    assert parse_element_type(alias).value == canonical


@pytest.mark.parametrize("bad", ["Lesion", "finding", "SPATIALTRIGGER",
                                 "spatialtrigger", "", " Finding", "Finding "])
def test_unknown_entity_names_rejected(bad):
    with pytest.raises(UnknownTypeError):
        parse_entity_type(bad)


@given(st.text(min_size=1, max_size=20))
def test_enumeration_closure(candidate):
    # parse succeeds exactly for the canonical names and documented aliases
    from eyeframes.schema import _ENTITY_ALIASES
    if candidate in _ENTITY_ALIASES:
        assert parse_entity_type(candidate).value in ENTITY_TYPE_NAMES
    else:
        with pytest.raises(UnknownTypeError):
            parse_entity_type(candidate)


def test_default_attachment_map_shape():
    amap = get_default_attachment_map()
    trigger = amap.elements_for(AnchorKind.TRIGGER)
    entity_side = amap.elements_for(AnchorKind.ENTITY)
    assert len(trigger) == 7
    assert set(trigger) == {"Figure", "Ground", "Hedge", "Diagnosis",
                            "RelativePosition", "Reason", "Medication"}
    assert len(entity_side) == 17
    assert amap.covered_elements() == set(ELEMENT_TYPE_NAMES)


def test_load_attachment_map_roundtrip(tmp_path):
    amap = get_default_attachment_map()
    path = tmp_path / "map.json"
    obj = {
        kind.value: {el: "any" for el in amap.elements_for(kind)}
        for kind in AnchorKind
    }
    path.write_text(json.dumps(obj), encoding="utf-8")
    loaded = load_attachment_map(path)
    assert loaded.licensed == amap.licensed


def test_load_attachment_map_missing_element(tmp_path):
    amap = get_default_attachment_map()
    obj = {
        kind.value: {el: "any" for el in amap.elements_for(kind) if el != "Value"}
        for kind in AnchorKind
    }
    path = tmp_path / "map.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    with pytest.raises(MissingElement) as err:
        load_attachment_map(path)
    assert err.value.name == "Value"


def test_load_attachment_map_extra_license(tmp_path):
    amap = get_default_attachment_map()
    obj = {
        kind.value: {el: "any" for el in amap.elements_for(kind)}
        for kind in AnchorKind
    }
    obj["TriggerFrame"]["Laterality"] = "any"
    path = tmp_path / "map.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    loaded = load_attachment_map(path)
    assert set(loaded.anchor_kinds("Laterality")) == set(AnchorKind)


def test_load_attachment_map_malformed(tmp_path):
    path = tmp_path / "map.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(MalformedConfig):
        load_attachment_map(path)
    path.write_text(json.dumps({"TriggerFrame": {"NotAnElement": "any"}}), encoding="utf-8")
    with pytest.raises(MalformedConfig):
        load_attachment_map(path)


def test_element_groups():
    assert element_group("Figure") == "Spatial(sptr)"
    assert element_group("Laterality") == "Spatial(entity)"
    assert element_group("Value") == "Desc(entity)"
    assert element_group("Diagnosis") == "Spatial(sptr)"


# --- validation ---------------------------------------------------------------

def test_valid_document_yields_no_violations(edema_doc):
    assert validate_annotation_set(edema_doc) == []


def test_laterality_on_finding_is_licensed():
    text = "edema left"
    doc = Document("d", text, [
        entity("T1", "Finding", 0, 5, text),
        entity("T2", "OtherDescriptor", 6, 10, text),
    ], [FrameElementInstance("Laterality", "T1", "T2")])
    assert validate_annotation_set(doc) == []


def test_figure_on_entity_anchor_unlicensed():
    text = "edema left"
    doc = Document("d", text, [
        entity("T1", "Finding", 0, 5, text),
        entity("T2", "OtherDescriptor", 6, 10, text),
    ], [FrameElementInstance("Figure", "T1", "T2")])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert codes == [ViolationCode.UNLICENSED_ELEMENT]


def test_unknown_entity_type_violation():
    text = "growth here"
    doc = Document("d", text, [entity("T1", "Lesion", 0, 6, text)], [])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert codes == [ViolationCode.UNKNOWN_ENTITY_TYPE]


def test_span_overflow_violation():
    doc = Document("d", "short", [
        EntityAnnotation("T1", "Finding", Span.contiguous(0, 99), "short")], [])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert ViolationCode.SPAN_OUT_OF_BOUNDS in codes


def test_surface_mismatch_violation():
    doc = Document("d", "edema here", [
        EntityAnnotation("T1", "Finding", Span.contiguous(0, 5), "oedema")], [])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert codes == [ViolationCode.SURFACE_MISMATCH]


def test_duplicate_annotation_violation():
    text = "edema"
    doc = Document("d", text, [
        entity("T1", "Finding", 0, 5, text),
        entity("T2", "Finding", 0, 5, text),
    ], [])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert codes == [ViolationCode.DUPLICATE_ANNOTATION]


def test_dangling_reference_violation():
    text = "edema left"
    doc = Document("d", text, [entity("T1", "Finding", 0, 5, text)],
                   [FrameElementInstance("Laterality", "T1", "T9")])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert codes == [ViolationCode.DANGLING_REFERENCE]


def test_bad_anchor_type_violation():
    text = "eye left"
    doc = Document("d", text, [
        entity("T1", "Anatomy", 0, 3, text),
        entity("T2", "OtherDescriptor", 4, 8, text),
    ], [FrameElementInstance("Laterality", "T1", "T2")])
    codes = [v.code for v in validate_annotation_set(doc)]
    assert codes == [ViolationCode.BAD_ANCHOR_TYPE]


def test_filler_restriction_enforced(tmp_path):
    amap = get_default_attachment_map()
    obj = {
        kind.value: {el: "any" for el in amap.elements_for(kind)}
        for kind in AnchorKind
    }
    obj["EntityFrame"]["Laterality"] = ["OtherDescriptor"]
    path = tmp_path / "map.json"
    path.write_text(json.dumps(obj), encoding="utf-8")
    restricted = load_attachment_map(path)

    text = "edema eye"
    doc = Document("d", text, [
        entity("T1", "Finding", 0, 5, text),
        entity("T2", "Anatomy", 6, 9, text),
    ], [FrameElementInstance("Laterality", "T1", "T2")])
    codes = [v.code for v in validate_annotation_set(doc, restricted)]
    assert codes == [ViolationCode.FILLER_TYPE_RESTRICTED]
    assert validate_annotation_set(doc) == []  # default map allows any filler
