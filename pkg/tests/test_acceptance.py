"""Acceptance criteria for the toolkit, one test per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  The fixed corpus seed below is the repo-pinned seed for all
acceptance corpora.
"""
from __future__ import annotations

import random
import time

import pytest

from eyeframes.agreement import agreement_f1
from eyeframes.backends import OracleBackend
from eyeframes.brat import emit_brat, parse_brat
from eyeframes.evaluation import brute_force_check, evaluate_all
from eyeframes.model import (
    Corpus,
    Document,
    EntityAnnotation,
    FrameElementInstance,
    Span,
    same_content,
)
from eyeframes.pipeline import ExtractionConfig, run_pipeline
from eyeframes.queries import get_default_templates, make_turn2_query
from eyeframes.schema import ViolationCode, validate_annotation_set
from eyeframes.split import split_corpus
from eyeframes.synth import GeneratorConfig, generate, generate_dual_layer

from test_evaluation import random_corpus_pair

ACCEPTANCE_SEED = 20240613


def _passed(name: str) -> None:
    print(f"\n[PASS] {name}")


def test_oracle_end_to_end_fixpoint():
    """100 synthetic notes, full two-turn pipeline on the gold oracle:
    F1 = 1.000 exactly for every populated type; < 30 s."""
    started = time.monotonic()
    corpus = generate(GeneratorConfig(seed=ACCEPTANCE_SEED, note_count=100))
    # markers pin each query to one anchor occurrence, which is what makes an
    # exact fixpoint on repeated-surface anchors possible
    config = ExtractionConfig(markers=True, anchor_mode="predicted")
    results = run_pipeline(corpus, lambda doc: OracleBackend(doc), config)
    assert all(not r.failed for r in results)
    predicted = Corpus([r.document for r in results])
    report = evaluate_all(predicted, corpus, anchor_matching="strict")
    elapsed = time.monotonic() - started

    assert report.rows
    for row in report.rows:
        assert row.f1 == 1.0, (row.group, row.label, row.tp, row.fp, row.fn)
        assert row.fp == 0 and row.fn == 0
    populated_entities = {r.label for r in report.rows if r.group == "Entity"}
    assert {"SpatialTrigger", "Finding", "Anatomy"} <= populated_entities
    assert elapsed < 30.0, f"pipeline took {elapsed:.1f}s"
    _passed(f"oracle end-to-end fixpoint: {len(report.rows)} type rows at F1=1.000 "
            f"in {elapsed:.1f}s")


def test_evaluator_matches_quadratic_oracle():
    """1000 randomized pred/gold pairs: hash evaluator equals the quadratic
    brute-force evaluator on every tally, zero tolerance."""
    rng = random.Random(ACCEPTANCE_SEED)
    trials = 1000
    for trial in range(trials):
        pred, gold = random_corpus_pair(rng)
        matching = "strict" if trial % 2 == 0 else "span-only"
        fast = evaluate_all(pred, gold, anchor_matching=matching)
        slow = brute_force_check(pred, gold, anchor_matching=matching)
        assert fast.tallies() == slow.tallies(), f"divergence at trial {trial}"
    _passed(f"evaluator/oracle equivalence over {trials} randomized corpus pairs")


IMPACT_QUERY = (
    "ImpactOnSide refers to which eye side is more impacted. Examples include "
    "right greater than left, smaller than left, and worse in the left eye. "
    "find all descriptor entities in the context that have a impact on side "
    "relationship with clinical finding entity optic neuropathy."
)

SHIPPED_DESCRIPTIONS = {
    "Medication": "Medication refers to a drug or solution that has been "
                  "administered or applied to any eye location.",
    "ImpactOnSide": "ImpactOnSide refers to which eye side is more impacted. "
                    "Examples include right greater than left, smaller than left, "
                    "and worse in the left eye.",
    "Pathphysio": "Pathophysiologic descriptor refers to the functional changes "
                  "that accompany a disease. Examples include autoimmune and "
                  "physiologic.",
    "Direction": "Direction indicates direction of a finding. Examples include "
                 "outward and to the right.",
    "AssociatedDiagnosis": "Associated diagnosis refers to the clinical condition "
                           "or disease associated with a finding. This usually "
                           "appears after phrases such as associated with and "
                           "secondary to.",
    "SpecificLocation": "Location descriptor refers to the exact location of a "
                        "finding. Examples include retrooorbital and optic disc.",
    "Certainty": "Certainty descriptor refers to uncertainty phrases describing a "
                 "finding. Examples include significant and consistent with.",
    "Value": "Value refers to a visual acuity score or any measurement or ratio. "
             "Examples include 20/20, 20/40, 16, and 0.8.",
}


def test_query_fidelity():
    """The ImpactOnSide example query and all eight shipped element
    descriptions are reproduced byte-for-byte."""
    finding = EntityAnnotation("T1", "Finding", Span.contiguous(0, 16), "optic neuropathy")
    trigger = EntityAnnotation("T2", "SpatialTrigger", Span.contiguous(0, 2), "in")
    assert make_turn2_query("ImpactOnSide", finding) == IMPACT_QUERY

    templates = get_default_templates()
    for element, description in SHIPPED_DESCRIPTIONS.items():
        assert templates.element_descriptions[element] == description
        anchor = trigger if element == "Medication" else finding
        query = make_turn2_query(element, anchor)
        assert query.startswith(description + " ")
    _passed("query fidelity: example query and 8 shipped descriptions byte-exact")


def test_brat_round_trip():
    """parse(emit(doc)) equals doc for the full synthetic corpus, including
    discontinuous spans; re-emission is byte-identical."""
    main = generate(GeneratorConfig(seed=ACCEPTANCE_SEED, note_count=100))
    disc = generate(GeneratorConfig(seed=ACCEPTANCE_SEED + 1, note_count=12,
                                    discontinuous_rate=0.5))
    documents = main.documents + disc.documents
    disc_docs = [d for d in documents
                 if any(not e.span.is_contiguous for e in d.entities)]
    assert disc_docs, "corpus must include at least one discontinuous-span document"
    for doc in documents:
        txt, ann = emit_brat(doc)
        again = parse_brat(txt, ann, doc_id=doc.doc_id)
        assert same_content(doc, again), doc.doc_id
        assert emit_brat(again) == (txt, ann), doc.doc_id
    _passed(f"standoff round-trip over {len(documents)} notes "
            f"({len(disc_docs)} with discontinuous spans)")


def _mutate(doc: Document, kind: str, rng: random.Random) -> Document:
    entities = list(doc.entities)
    elements = list(doc.elements)
    if kind == "unknown-type":
        i = rng.randrange(len(entities))
        entities[i] = EntityAnnotation(entities[i].id, "Lesion",
                                       entities[i].span, entities[i].surface)
    elif kind == "unlicensed-element":
        anchors = [e for e in entities if e.etype in ("Finding", "Procedure", "Drug")]
        anchor = rng.choice(anchors)
        filler = rng.choice([e for e in entities if e.id != anchor.id])
        elements.append(FrameElementInstance("Figure", anchor.id, filler.id))
    elif kind == "dangling-reference":
        i = rng.randrange(len(elements))
        elements[i] = FrameElementInstance(elements[i].element,
                                           elements[i].anchor_id, "T999")
    elif kind == "span-overflow":
        i = rng.randrange(len(entities))
        ent = entities[i]
        entities[i] = EntityAnnotation(
            ent.id, ent.etype,
            Span.contiguous(len(doc.text) + 1, len(doc.text) + 5), ent.surface)
    elif kind == "surface-mismatch":
        i = rng.randrange(len(entities))
        ent = entities[i]
        entities[i] = EntityAnnotation(ent.id, ent.etype, ent.span, "###mismatch###")
    return Document(doc.doc_id, doc.text, entities, elements)


MUTATION_TO_CODE = {
    "unknown-type": ViolationCode.UNKNOWN_ENTITY_TYPE,
    "unlicensed-element": ViolationCode.UNLICENSED_ELEMENT,
    "dangling-reference": ViolationCode.DANGLING_REFERENCE,
    "span-overflow": ViolationCode.SPAN_OUT_OF_BOUNDS,
    "surface-mismatch": ViolationCode.SURFACE_MISMATCH,
}


def test_validation_completeness():
    """Every injected violation class is detected in 100% of cases."""
    corpus = generate(GeneratorConfig(seed=ACCEPTANCE_SEED, note_count=30))
    rng = random.Random(ACCEPTANCE_SEED)
    eligible = [d for d in corpus.documents if len(d.entities) >= 2 and d.elements]
    assert len(eligible) >= 20
    checks = 0
    for kind, code in MUTATION_TO_CODE.items():
        for doc in eligible:
            assert validate_annotation_set(doc) == []
            mutated = _mutate(doc, kind, rng)
            found = {v.code for v in validate_annotation_set(mutated)}
            assert code in found, (kind, doc.doc_id, found)
            checks += 1
    _passed(f"validation completeness: {checks} mutations across "
            f"{len(MUTATION_TO_CODE)} violation classes all detected")


def test_agreement_sanity():
    """Drop-only dual layer at rate 0.2 over 1000+ annotations: per-type
    recall in [0.75, 0.85] wherever the quota is statistically meaningful
    (>= 10 instances); rate 0 gives F1 = 1 exactly."""
    config = GeneratorConfig(seed=ACCEPTANCE_SEED, note_count=40)
    perfect = generate_dual_layer(config, 0.0)
    for row in agreement_f1(perfect.documents, perfect.second_layer).rows:
        assert row.f1 == 1.0

    corpus = generate_dual_layer(config, 0.2, mode="drop")
    total = sum(len(d.entities) for d in corpus.documents)
    assert total >= 1000
    report = agreement_f1(corpus.documents, corpus.second_layer)
    gold_counts = {}
    for doc in corpus.documents:
        for ent in doc.entities:
            gold_counts[ent.etype] = gold_counts.get(ent.etype, 0) + 1
    checked = 0
    for etype, count in gold_counts.items():
        if count < 10:
            continue
        row = report.row(etype, group="Entity")
        assert row is not None
        assert 0.75 <= row.recall <= 0.85, (etype, count, row.recall)
        checked += 1
    assert checked >= 5
    _passed(f"agreement sanity: {total} annotations, recall in [0.75, 0.85] "
            f"for {checked} entity types at drop rate 0.2; rate 0 exact")


def test_split_determinism():
    """split --seed 13 --sizes 450,50,100 over a 600-note synthetic corpus:
    identical partition across runs, sizes exact."""
    corpus = generate(GeneratorConfig(seed=ACCEPTANCE_SEED, note_count=600))
    first = split_corpus(corpus, seed=13, sizes=(450, 50, 100))
    second = split_corpus(corpus, seed=13, sizes=(450, 50, 100))
    assert tuple(len(part) for part in first) == (450, 50, 100)
    for a, b in zip(first, second):
        assert [d.doc_id for d in a.documents] == [d.doc_id for d in b.documents]
    all_ids = [d.doc_id for part in first for d in part.documents]
    assert len(set(all_ids)) == 600
    # frozen prefix: makes any cross-platform drift in the seeded shuffle visible
    assert [d.doc_id for d in first[1].documents[:3]] == \
        ["note0378", "note0080", "note0365"]
    assert [d.doc_id for d in first[2].documents[:3]] == \
        ["note0304", "note0329", "note0589"]
    _passed("split determinism: 450/50/100 partition stable across runs")
