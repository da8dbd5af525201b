"""Seeded generator of synthetic ophthalmology-style notes with gold
annotations.

Notes are assembled from hand-written sentence skeletons; each skeleton fills
vocabulary slots and wires frame elements between them, so gold spans are
exact by construction.  A greedy quota planner picks how many instances of
each skeleton to render so that corpus-level per-type counts track the
configured targets.  Everything is driven by one seeded RNG: the same config
always yields byte-identical notes.
"""
from __future__ import annotations

import math
import random
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import VocabularyMissing
from .model import Corpus, Document, EntityAnnotation, FrameElementInstance, Span
from .schema import ENTITY_TYPE_NAMES

# --- vocabularies ----------------------------------------------------------------

DEFAULT_VOCAB: dict[str, tuple[str, ...]] = {
    "findings": (
        "edema", "proptosis", "retraction", "occlusion", "retinopathy",
        "pain", "numbness", "weakness", "thinning", "atrophy", "hemorrhage",
        "drusen", "opacity", "scotoma", "neuropathy", "detachment",
        "degeneration", "inflammation", "swelling", "keratitis", "uveitis",
        "floaters", "photophobia", "diplopia", "ptosis", "nystagmus",
        "exudate", "neovascularization", "ischemia", "scarring", "haze",
        "dryness", "tearing", "redness", "irritation", "hypertropia",
        "injection", "chemosis", "cupping", "pallor",
    ),
    "diagnoses": (
        "optic neuritis", "glaucoma", "macular degeneration",
        "oculogyric crisis", "retinal detachment", "uveitic syndrome",
    ),
    "anatomies": (
        "eye", "eyes", "retina", "macula", "cornea", "iris", "orbit",
        "eyelid", "sclera", "conjunctiva", "choroid", "fovea", "globe",
        "pupil", "anterior chamber", "vitreous", "optic nerve", "lens",
    ),
    "anatomy_parts": ("disc", "cup", "limbus", "margin", "periphery", "apex"),
    "locdescs": (
        "retroorbital", "paracentral", "perivascular", "juxtafoveal",
        "peripapillary", "parafoveal",
    ),
    "lateralities": ("left", "right", "bilateral", "both"),
    "eye_abbrevs": ("OD", "OS", "OU"),
    "statuses": (
        "mild", "moderate", "severe", "stable", "trace", "new", "chronic",
        "worsening", "improving", "persistent",
    ),
    "hedges": ("likely", "possibly", "apparently", "presumably"),
    "certainties": ("significant", "probable", "questionable", "presumed"),
    "negation_words": ("no", "without"),
    "denial_words": ("denies",),
    "neg_assertions": ("negative",),
    "pos_assertions": ("positive", "remarkable", "notable"),
    "quantities": ("two", "three", "multiple", "several", "few"),
    "quantity_descs": ("multiple", "several", "few", "numerous"),
    "acuities": ("20/20", "20/25", "20/30", "20/40", "20/70", "20/100", "20/200", "CF"),
    "measure_values": ("15", "16", "12", "18", "21", "0.4", "0.8", "0.3", "0.6"),
    "measure_findings": (
        "Cup/Disc Ratio", "INTRAOCULAR PRESSURE", "Central corneal thickness",
        "Tear breakup time",
    ),
    "vision_words": ("vision",),
    "procedures": (
        "cataract surgery", "trabeculectomy", "vitrectomy", "laser iridotomy",
        "photocoagulation", "keratoplasty",
    ),
    "drugs": (
        "latanoprost", "timolol", "prednisolone acetate", "atropine",
        "brimonidine", "dorzolamide",
    ),
    "devices": ("stent", "shunt", "keratoprosthesis", "intraocular lens"),
    "temporals": (
        "over the next few days", "for two years", "early in the mornings",
        "since the last visit", "for several weeks", "within 1-2 months",
    ),
    "morphologics": ("flat", "elevated", "nodular", "cystic"),
    "size_descs": ("small", "large", "tiny", "extensive"),
    "sizes": ("3 mm", "2 mm", "0.5 mm", "4 mm"),
    "dist_patterns": ("diffuse", "scattered", "focal", "patchy"),
    "compositions": ("fluid", "calcified", "fibrous", "pigmented"),
    "rel_positions": ("adjacent", "superior", "inferior", "temporal"),
    "directions": ("outward", "upward", "downward", "to the right", "to the left"),
    "impact_sides": (
        "right greater than left", "left greater than right",
        "worse in the left eye", "worse in the right eye", "smaller than left",
    ),
    "reasons": ("prior trauma", "recent surgery", "chronic inflammation"),
    "pathphysios": ("autoimmune", "physiologic", "ischemic", "inflammatory", "degenerative"),
    "media_descs": ("hazy", "clear", "cloudy"),
    "prepositions": ("in", "in", "in", "of", "of", "within", "at", "behind", "involving"),
    "verb_triggers": ("are", "are", "reveals", "shows", "appear", "demonstrates"),
    "disc_words": ("vision", "color", "field"),
}


# --- skeleton grammar --------------------------------------------------------------

@dataclass(frozen=True)
class Slot:
    name: str
    etype: str
    vocab: str


@dataclass(frozen=True)
class Skeleton:
    sid: str
    template: str
    slots: tuple[Slot, ...]
    # (element type, anchor slot name, filler slot name)
    elements: tuple[tuple[str, str, str], ...] = ()

    def yield_vector(self) -> dict[tuple[str, str], int]:
        vec: Counter[tuple[str, str]] = Counter()
        for slot in self.slots:
            vec[("entity", slot.etype)] += 1
        for element, _a, _f in self.elements:
            vec[("element", element)] += 1
        return dict(vec)


def _sk(sid, template, slots, elements=()):
    return Skeleton(sid, template, tuple(Slot(*s) for s in slots), tuple(elements))


SKELETONS: tuple[Skeleton, ...] = (
    _sk("core_status_loc",
        "{status} {sloc} {finding} {prep} the {lat} {ground}.",
        [("status", "OtherDescriptor", "statuses"),
         # modifier-position location words ("disc edema") act as descriptors
         ("sloc", "OtherDescriptor", "anatomy_parts"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground"),
         ("Status", "finding", "status"), ("SpecificLocation", "finding", "sloc"),
         ("Laterality", "finding", "lat")]),
    _sk("core_locdesc",
        "{status} {locdesc} {finding} {prep} the {lat} {ground}.",
        [("status", "OtherDescriptor", "statuses"),
         ("locdesc", "LocationDescriptor", "locdescs"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground"),
         ("Status", "finding", "status"), ("SpecificLocation", "finding", "locdesc"),
         ("Laterality", "finding", "lat")]),
    _sk("two_findings",
        "She reports {finding1} and {finding2} {prep} the {lat} {ground}.",
        [("finding1", "Finding", "findings"),
         ("finding2", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding1"), ("Figure", "prep", "finding2"),
         ("Ground", "prep", "ground"),
         ("Laterality", "finding1", "lat"), ("Laterality", "finding2", "lat")]),
    _sk("two_grounds",
        "{finding} {prep} the {ground1} and {ground2}.",
        [("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground1", "Anatomy", "anatomies"),
         ("ground2", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground1"),
         ("Ground", "prep", "ground2")]),
    _sk("core_min",
        "{finding} {prep} the {ground}.",
        [("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground")]),
    _sk("verb_trigger",
        "The {ground} {verb} {status} {finding}.",
        [("ground", "Anatomy", "anatomies"),
         ("verb", "SpatialTrigger", "verb_triggers"),
         ("status", "OtherDescriptor", "statuses"),
         ("finding", "Finding", "findings")],
        [("Figure", "verb", "finding"), ("Ground", "verb", "ground"),
         ("Status", "finding", "status")]),
    _sk("acuity_pair",
        "She was found to have {val1} {vis1} {odlat1} and {val2} {vis2} {odlat2}.",
        [("val1", "Quantity", "acuities"),
         ("vis1", "Finding", "vision_words"),
         ("odlat1", "OtherDescriptor", "eye_abbrevs"),
         ("val2", "Quantity", "acuities"),
         ("vis2", "Finding", "vision_words"),
         ("odlat2", "OtherDescriptor", "eye_abbrevs")],
        [("Value", "vis1", "val1"), ("Laterality", "vis1", "odlat1"),
         ("Value", "vis2", "val2"), ("Laterality", "vis2", "odlat2")]),
    _sk("acuity_single",
        "{val} {vis} {odlat}.",
        [("val", "Quantity", "acuities"),
         ("vis", "Finding", "vision_words"),
         ("odlat", "OtherDescriptor", "eye_abbrevs")],
        [("Value", "vis", "val"), ("Laterality", "vis", "odlat")]),
    _sk("measurement",
        "Method: Applanation {measfinding}: {measval}.",
        [("measfinding", "Finding", "measure_findings"),
         ("measval", "Quantity", "measure_values")],
        [("Value", "measfinding", "measval")]),
    _sk("procedure_hist",
        "The patient underwent {procedure} {prep} the {lat} {ground} {temporal}.",
        [("procedure", "Procedure", "procedures"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies"),
         ("temporal", "OtherDescriptor", "temporals")],
        [("Figure", "prep", "procedure"), ("Ground", "prep", "ground"),
         ("Laterality", "procedure", "lat"), ("Temporal", "procedure", "temporal")]),
    _sk("medication",
        "{drug} was applied {prep} the {lat} {ground}.",
        [("drug", "Drug", "drugs"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies")],
        [("Medication", "prep", "drug"), ("Ground", "prep", "ground"),
         ("Laterality", "drug", "lat")]),
    _sk("negation",
        "There is {neg} {finding} {prep} the {ground}.",
        [("neg", "Assertion", "negation_words"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("Negation", "finding", "neg"), ("Figure", "prep", "finding"),
         ("Ground", "prep", "ground")]),
    _sk("denies",
        "Patient {neg} {finding} {prep} the {lat} {ground}.",
        [("neg", "Assertion", "denial_words"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies")],
        [("Negation", "finding", "neg"), ("Figure", "prep", "finding"),
         ("Ground", "prep", "ground"), ("Laterality", "finding", "lat")]),
    _sk("hedge_min",
        "{hedge} {finding} {prep} the {ground}.",
        [("hedge", "OtherDescriptor", "hedges"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("Hedge", "prep", "hedge"), ("Figure", "prep", "finding"),
         ("Ground", "prep", "ground")]),
    _sk("hedge_core",
        "{hedge} {status} {sloc} {finding} {prep} the {lat} {ground}.",
        [("hedge", "OtherDescriptor", "hedges"),
         ("status", "OtherDescriptor", "statuses"),
         ("sloc", "OtherDescriptor", "anatomy_parts"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies")],
        [("Hedge", "prep", "hedge"), ("Figure", "prep", "finding"),
         ("Ground", "prep", "ground"), ("Status", "finding", "status"),
         ("SpecificLocation", "finding", "sloc"), ("Laterality", "finding", "lat")]),
    _sk("hedge_two_findings",
        "{hedge} {finding1} and {finding2} {prep} the {ground}.",
        [("hedge", "OtherDescriptor", "hedges"),
         ("finding1", "Finding", "findings"),
         ("finding2", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("Hedge", "prep", "hedge"), ("Figure", "prep", "finding1"),
         ("Figure", "prep", "finding2"), ("Ground", "prep", "ground")]),
    _sk("pair_pair",
        "{finding1} and {finding2} {prep} the {ground1} and {ground2}.",
        [("finding1", "Finding", "findings"),
         ("finding2", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground1", "Anatomy", "anatomies"),
         ("ground2", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding1"), ("Figure", "prep", "finding2"),
         ("Ground", "prep", "ground1"), ("Ground", "prep", "ground2")]),
    _sk("hedge_diagnosis",
        "The {finding} {prep} the {ground} is {hedge} explained by {diagnosis}.",
        [("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies"),
         ("hedge", "OtherDescriptor", "hedges"),
         ("diagnosis", "Finding", "diagnoses")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground"),
         ("Hedge", "prep", "hedge"), ("Diagnosis", "prep", "diagnosis")]),
    _sk("certainty",
        "Past ocular history is {certainty} for {finding1} and {finding2}.",
        [("certainty", "OtherDescriptor", "certainties"),
         ("finding1", "Finding", "findings"),
         ("finding2", "Finding", "findings")],
        [("Certainty", "finding1", "certainty"),
         ("Certainty", "finding2", "certainty")]),
    _sk("impact",
        "External examination reveals a {lat1} {finding1} with {lat2} {sloc} {finding2} {impact}.",
        [("lat1", "OtherDescriptor", "lateralities"),
         ("finding1", "Finding", "findings"),
         ("lat2", "OtherDescriptor", "lateralities"),
         ("sloc", "OtherDescriptor", "anatomy_parts"),
         ("finding2", "Finding", "findings"),
         ("impact", "OtherDescriptor", "impact_sides")],
        [("Laterality", "finding1", "lat1"), ("Laterality", "finding2", "lat2"),
         ("SpecificLocation", "finding2", "sloc"),
         ("ImpactOnSide", "finding2", "impact")]),
    _sk("direction",
        "{finding} {prep} the {lat} {ground} directed {direction}.",
        [("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("lat", "OtherDescriptor", "lateralities"),
         ("ground", "Anatomy", "anatomies"),
         ("direction", "OtherDescriptor", "directions")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground"),
         ("Laterality", "finding", "lat"), ("Direction", "finding", "direction")]),
    _sk("pathphysio",
        "She is seen for {finding1} in the setting of {pathphysio} {finding2}.",
        [("finding1", "Finding", "findings"),
         ("pathphysio", "OtherDescriptor", "pathphysios"),
         ("finding2", "Finding", "findings")],
        [("Pathphysio", "finding2", "pathphysio")]),
    _sk("assoc_diag",
        "With {quant} {finding} one must consider {diagnosis}.",
        [("quant", "OtherDescriptor", "quantity_descs"),
         ("finding", "Finding", "findings"),
         ("diagnosis", "Finding", "diagnoses")],
        [("Quantity", "finding", "quant"),
         ("AssociatedDiagnosis", "finding", "diagnosis")]),
    _sk("size_morph",
        "A {sizedesc} {morph} {finding} measuring {size} {prep} the {ground}.",
        [("sizedesc", "OtherDescriptor", "size_descs"),
         ("morph", "OtherDescriptor", "morphologics"),
         ("finding", "Finding", "findings"),
         ("size", "OtherDescriptor", "sizes"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("SizeDesc", "finding", "sizedesc"), ("Morphologic", "finding", "morph"),
         ("Size", "finding", "size"), ("Figure", "prep", "finding"),
         ("Ground", "prep", "ground")]),
    _sk("dist_comp",
        "{distpat} {comp} {finding} {prep} the {ground}.",
        [("distpat", "OtherDescriptor", "dist_patterns"),
         ("comp", "OtherDescriptor", "compositions"),
         ("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("DistributionPattern", "finding", "distpat"),
         ("Composition", "finding", "comp"),
         ("Figure", "prep", "finding"), ("Ground", "prep", "ground")]),
    _sk("relpos",
        "{finding} {prep} the {ground}, {relpos} to the {anat2}.",
        [("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies"),
         ("relpos", "OtherDescriptor", "rel_positions"),
         ("anat2", "Anatomy", "anatomies")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground"),
         ("RelativePosition", "prep", "relpos")]),
    _sk("reason",
        "{finding} {prep} the {ground} due to {reason}.",
        [("finding", "Finding", "findings"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies"),
         ("reason", "OtherDescriptor", "reasons")],
        [("Figure", "prep", "finding"), ("Ground", "prep", "ground"),
         ("Reason", "prep", "reason")]),
    _sk("device",
        "A {device} is present {prep} the {ground}.",
        [("device", "Device", "devices"),
         ("prep", "SpatialTrigger", "prepositions"),
         ("ground", "Anatomy", "anatomies")],
        [("Figure", "prep", "device"), ("Ground", "prep", "ground")]),
    # trigger-free multi-element sentences; without them every descriptor
    # would drag a spatial frame along and the type mix could not balance
    _sk("entity_rich",
        "{status} {sloc} {finding} {odlat}, stable {temporal}.",
        [("status", "OtherDescriptor", "statuses"),
         ("sloc", "OtherDescriptor", "anatomy_parts"),
         ("finding", "Finding", "findings"),
         ("odlat", "OtherDescriptor", "eye_abbrevs"),
         ("temporal", "OtherDescriptor", "temporals")],
        [("Status", "finding", "status"), ("SpecificLocation", "finding", "sloc"),
         ("Laterality", "finding", "odlat"), ("Temporal", "finding", "temporal")]),
    _sk("status_lat",
        "{status} {finding} {odlat}.",
        [("status", "OtherDescriptor", "statuses"),
         ("finding", "Finding", "findings"),
         ("odlat", "OtherDescriptor", "eye_abbrevs")],
        [("Status", "finding", "status"), ("Laterality", "finding", "odlat")]),
    _sk("two_findings_status",
        "{finding1} and {finding2} are {status}.",
        [("finding1", "Finding", "findings"),
         ("finding2", "Finding", "findings"),
         ("status", "OtherDescriptor", "statuses")],
        [("Status", "finding1", "status"), ("Status", "finding2", "status")]),
    _sk("direction_only",
        "{finding} directed {direction}.",
        [("finding", "Finding", "findings"),
         ("direction", "OtherDescriptor", "directions")],
        [("Direction", "finding", "direction")]),
    _sk("proc_simple",
        "Status post {procedure} {odlat}.",
        [("procedure", "Procedure", "procedures"),
         ("odlat", "OtherDescriptor", "eye_abbrevs")],
        [("Laterality", "procedure", "odlat")]),
    # minimal one-element sentences keep the quota planner out of corners
    _sk("status_only",
        "The {finding} remains {status}.",
        [("finding", "Finding", "findings"),
         ("status", "OtherDescriptor", "statuses")],
        [("Status", "finding", "status")]),
    _sk("lat_only",
        "{finding} {odlat}.",
        [("finding", "Finding", "findings"),
         ("odlat", "OtherDescriptor", "eye_abbrevs")],
        [("Laterality", "finding", "odlat")]),
    _sk("sloc_only",
        "{sloc} {finding} noted.",
        [("sloc", "OtherDescriptor", "anatomy_parts"),
         ("finding", "Finding", "findings")],
        [("SpecificLocation", "finding", "sloc")]),
    _sk("temporal_only",
        "{finding} stable {temporal}.",
        [("finding", "Finding", "findings"),
         ("temporal", "OtherDescriptor", "temporals")],
        [("Temporal", "finding", "temporal")]),
    _sk("negation_only",
        "{neg} {finding}.",
        [("neg", "Assertion", "negation_words"),
         ("finding", "Finding", "findings")],
        [("Negation", "finding", "neg")]),
    _sk("dist_only",
        "{distpat} {finding} noted.",
        [("distpat", "OtherDescriptor", "dist_patterns"),
         ("finding", "Finding", "findings")],
        [("DistributionPattern", "finding", "distpat")]),
    _sk("quantity_el_only",
        "{quant} {finding} documented.",
        [("quant", "OtherDescriptor", "quantity_descs"),
         ("finding", "Finding", "findings")],
        [("Quantity", "finding", "quant")]),
    _sk("certainty_only",
        "{certainty} {finding}.",
        [("certainty", "OtherDescriptor", "certainties"),
         ("finding", "Finding", "findings")],
        [("Certainty", "finding", "certainty")]),
    _sk("assert_positive",
        "The exam is {posassert} for {finding}.",
        [("posassert", "Assertion", "pos_assertions"),
         ("finding", "Finding", "findings")]),
    _sk("quantity_mention",
        "{quant} episodes were documented.",
        [("quant", "Quantity", "quantities")]),
    _sk("anatomy_only",
        "The {anat} is unremarkable.",
        [("anat", "Anatomy", "anatomies")]),
    _sk("desc_only",
        "Media: {od}.",
        [("od", "OtherDescriptor", "media_descs")]),
    _sk("finding_only",
        "Assessment: {finding}.",
        [("finding", "Finding", "findings")]),
)

_FILLER_SENTENCE = "Routine follow up."

# per-note target ratios for a default corpus; chosen to mimic the type mix
# of real ophthalmology notes
DEFAULT_ENTITY_TARGETS: dict[str, float] = {
    "SpatialTrigger": 1715 / 600,
    "Finding": 7308 / 600,
    "Anatomy": 2424 / 600,
    "Device": 14 / 600,
    "Drug": 22 / 600,
    "Procedure": 182 / 600,
    "OtherDescriptor": 9782 / 600,
    "Quantity": 366 / 600,
    "Assertion": 1616 / 600,
    "LocationDescriptor": 132 / 600,
}
DEFAULT_ELEMENT_TARGETS: dict[str, float] = {
    "Figure": 2261 / 600,
    "Ground": 2094 / 600,
    "Hedge": 397 / 600,
    "Diagnosis": 18 / 600,
    "RelativePosition": 132 / 600,
    "Reason": 7 / 600,
    "Medication": 18 / 600,
    "Morphologic": 45 / 600,
    "SizeDesc": 43 / 600,
    "DistributionPattern": 83 / 600,
    "Composition": 36 / 600,
    "Laterality": 3464 / 600,
    "Size": 48 / 600,
    "ImpactOnSide": 97 / 600,
    "Direction": 85 / 600,
    "SpecificLocation": 1636 / 600,
    "Status": 3051 / 600,
    "Quantity": 101 / 600,
    "Temporal": 1066 / 600,
    "Negation": 921 / 600,
    "Pathphysio": 75 / 600,
    "Certainty": 298 / 600,
    "AssociatedDiagnosis": 72 / 600,
    "Value": 318 / 600,
}


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    note_count: int = 100
    entity_targets: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_ENTITY_TARGETS))
    element_targets: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_ELEMENT_TARGETS))
    vocabularies: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_VOCAB))
    discontinuous_rate: float = 0.0


# --- planning -----------------------------------------------------------------------

def plan_quota(config: GeneratorConfig) -> Counter:
    """Sentence counts per skeleton tracking the corpus-level targets.

    The continuous mix is a weighted non-negative least-squares fit of the
    skeleton yield matrix against the targets; flooring it and greedily adding
    sentences while the relative squared error still drops gives the integer
    plan.  Deterministic throughout.
    """
    import numpy as np
    from scipy.optimize import nnls

    targets: dict[tuple[str, str], float] = {}
    for name, ratio in config.entity_targets.items():
        targets[("entity", name)] = ratio * config.note_count
    for name, ratio in config.element_targets.items():
        targets[("element", name)] = ratio * config.note_count

    yields = {sk.sid: sk.yield_vector() for sk in SKELETONS}
    labels = sorted(set(targets) | {key for vec in yields.values() for key in vec})
    weight = {key: 1.0 / max(targets.get(key, 0.0), 1.0) ** 0.5 for key in labels}

    matrix = np.zeros((len(labels), len(SKELETONS)))
    goal = np.zeros(len(labels))
    for li, key in enumerate(labels):
        goal[li] = targets.get(key, 0.0) * weight[key]
        for si, sk in enumerate(SKELETONS):
            matrix[li, si] = yields[sk.sid].get(key, 0) * weight[key]
    solution, _residual = nnls(matrix, goal)

    counts: Counter = Counter()
    realized: defaultdict[tuple[str, str], float] = defaultdict(float)
    for si, sk in enumerate(SKELETONS):
        n = int(solution[si])
        if n > 0:
            counts[sk.sid] = n
            for key, amount in yields[sk.sid].items():
                realized[key] += amount * n

    def gain(vec: dict[tuple[str, str], int]) -> float:
        total = 0.0
        for key, amount in vec.items():
            t = targets.get(key, 0.0)
            cur = realized[key]
            total += ((cur + amount - t) ** 2 - (cur - t) ** 2) * weight[key] ** 2
        return total

    while True:
        best_sid, best_gain = None, -1e-9
        for sk in SKELETONS:
            g = gain(yields[sk.sid])
            if g < best_gain:
                best_sid, best_gain = sk.sid, g
        if best_sid is None:
            break
        counts[best_sid] += 1
        for key, amount in yields[best_sid].items():
            realized[key] += amount
    return counts


# --- rendering -----------------------------------------------------------------------

_SLOT_RE = re.compile(r"\{(\w+)\}")


@dataclass
class _Piece:
    """One rendered sentence: text plus annotations in sentence-local offsets."""
    text: str
    entities: list[tuple[str, str, int, int]]          # (slot, etype, start, end)
    elements: list[tuple[str, str, str]]               # (element, anchor slot, filler slot)
    disc_entity: tuple[str, str, tuple] | None = None  # (slot, etype, fragments)


def _render_skeleton(sk: Skeleton, rng: random.Random,
                     vocab: Mapping[str, tuple[str, ...]]) -> _Piece:
    slot_by_name = {s.name: s for s in sk.slots}
    parts: list[str] = []
    offsets: dict[str, tuple[int, int]] = {}
    pos = 0
    last = 0
    for m in _SLOT_RE.finditer(sk.template):
        literal = sk.template[last:m.start()]
        parts.append(literal)
        pos += len(literal)
        slot = slot_by_name[m.group(1)]
        value = rng.choice(vocab[slot.vocab])
        parts.append(value)
        offsets[slot.name] = (pos, pos + len(value))
        pos += len(value)
        last = m.end()
    parts.append(sk.template[last:])
    text = "".join(parts)
    entities = [
        (slot.name, slot.etype, offsets[slot.name][0], offsets[slot.name][1])
        for slot in sk.slots
    ]
    return _Piece(text, entities, list(sk.elements))


def _render_discontinuous(rng: random.Random,
                          vocab: Mapping[str, tuple[str, ...]]) -> _Piece:
    """'{w1} and {w2} loss in the left eye.' with a discontinuous finding
    '{w1} ... loss' plus a contiguous '{w2} loss'."""
    w1, w2 = rng.sample(list(vocab["disc_words"]), 2)
    prep = rng.choice(vocab["prepositions"])
    lat = rng.choice(vocab["lateralities"])
    ground = rng.choice(vocab["anatomies"])
    text = f"She notes {w1} and {w2} loss {prep} the {lat} {ground}."
    w1_start = len("She notes ")
    w2_start = w1_start + len(w1) + len(" and ")
    loss_start = w2_start + len(w2) + 1
    prep_start = loss_start + len("loss") + 1
    lat_start = prep_start + len(prep) + len(" the ")
    ground_start = lat_start + len(lat) + 1
    piece = _Piece(text, [], [])
    piece.entities = [
        ("w2loss", "Finding", w2_start, loss_start + len("loss")),
        ("prep", "SpatialTrigger", prep_start, prep_start + len(prep)),
        ("lat", "OtherDescriptor", lat_start, lat_start + len(lat)),
        ("ground", "Anatomy", ground_start, ground_start + len(ground)),
    ]
    piece.elements = [
        ("Figure", "prep", "w1loss"), ("Figure", "prep", "w2loss"),
        ("Ground", "prep", "ground"), ("Laterality", "w1loss", "lat"),
    ]
    # the discontinuous entity is carried separately: two fragments
    piece.disc_entity = ("w1loss", "Finding",
                         ((w1_start, w1_start + len(w1)),
                          (loss_start, loss_start + len("loss"))))
    return piece


def generate(config: GeneratorConfig) -> Corpus:
    """Synthesize a gold-annotated corpus; same config, same bytes."""
    vocab = dict(config.vocabularies)
    needed = {slot.vocab for sk in SKELETONS for slot in sk.slots}
    if config.discontinuous_rate > 0:
        needed |= {"disc_words", "prepositions", "lateralities", "anatomies"}
    for key in sorted(needed):
        if not vocab.get(key):
            raise VocabularyMissing(key)

    rng = random.Random(config.seed)
    quota = plan_quota(config)
    sentence_plan: list[str] = []
    for sid in sorted(quota):
        sentence_plan.extend([sid] * quota[sid])
    rng.shuffle(sentence_plan)

    by_skeleton = {sk.sid: sk for sk in SKELETONS}
    buckets: list[list[str]] = [[] for _ in range(config.note_count)]
    for i, sid in enumerate(sentence_plan):
        buckets[i % config.note_count].append(sid)

    documents: list[Document] = []
    for note_idx, sids in enumerate(buckets):
        doc_id = f"note{note_idx:04d}"
        pieces = [_render_skeleton(by_skeleton[sid], rng, vocab) for sid in sids]
        if config.discontinuous_rate > 0 and rng.random() < config.discontinuous_rate:
            pieces.append(_render_discontinuous(rng, vocab))
        if not pieces:
            pieces.append(_Piece(_FILLER_SENTENCE, [], []))

        text_parts = [f"EXAM NOTE {note_idx}\n"]
        pos = len(text_parts[0])
        entities: list[EntityAnnotation] = []
        elements: list[FrameElementInstance] = []
        counter = 0
        for piece_idx, piece in enumerate(pieces):
            slot_ids: dict[str, str] = {}
            for slot_name, etype, s, e in piece.entities:
                counter += 1
                tid = f"T{counter}"
                span = Span.contiguous(pos + s, pos + e)
                entities.append(EntityAnnotation(tid, etype, span, piece.text[s:e]))
                slot_ids[slot_name] = tid
            disc = piece.disc_entity
            if disc is not None:
                slot_name, etype, fragments = disc
                counter += 1
                tid = f"T{counter}"
                span = Span(tuple((pos + s, pos + e) for s, e in fragments))
                entities.append(EntityAnnotation(tid, etype, span, span.shift(-pos).extract(piece.text)))
                slot_ids[slot_name] = tid
            for element, anchor_slot, filler_slot in piece.elements:
                elements.append(FrameElementInstance(
                    element, slot_ids[anchor_slot], slot_ids[filler_slot]))
            text_parts.append(piece.text)
            pos += len(piece.text)
            if piece_idx < len(pieces) - 1:
                sep = "\n" if rng.random() < 0.25 else " "
                text_parts.append(sep)
                pos += len(sep)
        text_parts.append("\n")
        text = "".join(text_parts)
        documents.append(Document(doc_id, text, entities, elements).canonicalized())
    return Corpus(documents)


# --- dual annotation layers ------------------------------------------------------------

PERTURB_MODES = ("drop", "shift", "retype", "mixed")


def _quota(rate: float, n: int) -> int:
    return min(n, math.floor(rate * n + 0.5))


def generate_dual_layer(config: GeneratorConfig, disagreement_rate: float,
                        mode: str = "drop") -> Corpus:
    """First layer is generate(config); the second layer perturbs a per-type
    exact-quota sample of entity annotations.  Samples for different rates
    nest (same config, higher rate perturbs a superset), so agreement is
    monotone in the rate.
    """
    if not 0.0 <= disagreement_rate <= 1.0:
        raise ValueError("disagreement rate must be in [0, 1]")
    if mode not in PERTURB_MODES:
        raise ValueError(f"unknown perturbation mode {mode!r}")
    corpus = generate(config)
    rng = random.Random(f"{config.seed}/dual-layer")
    mode_rng = random.Random(f"{config.seed}/dual-layer-modes")

    by_type: dict[str, list[tuple[int, str]]] = defaultdict(list)
    for doc_idx, doc in enumerate(corpus.documents):
        for ent in doc.entities:
            by_type[ent.etype].append((doc_idx, ent.id))
    victims: dict[tuple[int, str], str] = {}
    for etype in sorted(by_type):
        pool = by_type[etype]
        order = sorted(pool, key=lambda _item: rng.random())
        k = _quota(disagreement_rate, len(pool))
        for doc_idx, ent_id in order[:k]:
            sub_mode = mode if mode != "mixed" else mode_rng.choice(("drop", "shift", "retype"))
            victims[(doc_idx, ent_id)] = sub_mode

    second: list[Document] = []
    for doc_idx, doc in enumerate(corpus.documents):
        entities: list[EntityAnnotation] = []
        dropped: set[str] = set()
        for ent in doc.entities:
            action = victims.get((doc_idx, ent.id))
            if action is None:
                entities.append(ent)
            elif action == "drop":
                dropped.add(ent.id)
            elif action == "shift":
                entities.append(_shift_entity(ent, doc.text))
            elif action == "retype":
                names = list(ENTITY_TYPE_NAMES)
                next_type = names[(names.index(ent.etype) + 1) % len(names)] \
                    if ent.etype in names else names[0]
                entities.append(replace(ent, etype=next_type))
        elements = [
            inst for inst in doc.elements
            if inst.anchor_id not in dropped and inst.filler_id not in dropped
        ]
        second.append(Document(doc.doc_id, doc.text, entities, elements))
    return Corpus(corpus.documents, second_layer=second)


def _shift_entity(ent: EntityAnnotation, text: str) -> EntityAnnotation:
    start, end = ent.span.start, ent.span.end
    fragments = ent.fragments
    if end < len(text) and text[end] != "\n":
        fragments = fragments[:-1] + ((fragments[-1][0], end + 1),)
    elif start > 0 and text[start - 1] != "\n":
        fragments = ((start - 1, fragments[0][1]),) + fragments[1:]
    else:
        return ent
    span = Span(fragments)
    return replace(ent, span=span, surface=span.extract(text))
