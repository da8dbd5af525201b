from __future__ import annotations

import random

import pytest

from eyeframes.errors import CorpusMismatch
from eyeframes.evaluation import (
    brute_force_check,
    evaluate_all,
    evaluate_elements,
    evaluate_entities,
)
from eyeframes.model import Corpus, Document, EntityAnnotation, FrameElementInstance, Span
from eyeframes.schema import ELEMENT_TYPE_NAMES, ENTITY_TYPE_NAMES

from conftest import entity


def test_identity_scores_one(edema_corpus):
    report = evaluate_all(edema_corpus, edema_corpus)
    assert report.rows
    for row in report.rows:
        assert (row.precision, row.recall, row.f1) == (1.0, 1.0, 1.0)


def test_off_by_one_span_costs_both():
    text = "mild disc edema"
    gold = Corpus([Document("d", text, [entity("T1", "Finding", 10, 15, text)], [])])
    pred = Corpus([Document("d", text, [entity("T1", "Finding", 10, 14, text)], [])])
    row = evaluate_entities(pred, gold).row("Finding")
    assert (row.tp, row.fp, row.fn) == (0, 1, 1)
    assert (row.precision, row.recall, row.f1) == (0.0, 0.0, 0.0)


def _anchored_corpus(anchor_range, filler_range=(23, 27)):
    text = "mild disc edema in the left eye."
    anchor = entity("T1", "Finding", *anchor_range, text)
    filler = entity("T2", "OtherDescriptor", *filler_range, text)
    inst = FrameElementInstance("Laterality", "T1", "T2")
    return Corpus([Document("d", text, [anchor, filler], [inst])])


def test_strict_vs_span_only_anchor_matching():
    gold = _anchored_corpus((10, 15))
    pred = _anchored_corpus((5, 9))  # right filler, wrong anchor span
    strict = evaluate_elements(pred, gold, "strict").row("Laterality")
    loose = evaluate_elements(pred, gold, "span-only").row("Laterality")
    assert (strict.tp, strict.fp, strict.fn) == (0, 1, 1)
    assert (loose.tp, loose.fp, loose.fn) == (1, 0, 0)


def test_empty_predictions():
    text = "edema"
    gold = Corpus([Document("d", text, [entity("T1", "Finding", 0, 5, text)], [])])
    pred = Corpus([Document("d", text, [], [])])
    row = evaluate_entities(pred, gold).row("Finding")
    assert (row.precision, row.recall, row.f1) == (0.0, 0.0, 0.0)
    assert (row.tp, row.fp, row.fn) == (0, 0, 1)


def test_f1_is_harmonic_mean(edema_corpus):
    report = evaluate_all(edema_corpus, edema_corpus)
    for row in report.rows:
        p, r = row.precision, row.recall
        expected = 2 * p * r / (p + r) if p + r else 0.0
        assert row.f1 == expected


def test_corpus_mismatch():
    a = Corpus([Document("x", "text", [], [])])
    b = Corpus([Document("y", "text", [], [])])
    with pytest.raises(CorpusMismatch):
        evaluate_entities(a, b)
    c = Corpus([Document("x", "other", [], [])])
    with pytest.raises(CorpusMismatch):
        evaluate_entities(a, c)


def test_types_with_no_instances_are_omitted(edema_corpus):
    report = evaluate_all(edema_corpus, edema_corpus)
    labels = {r.label for r in report.rows if r.group == "Entity"}
    assert "Device" not in labels


def test_adding_correct_prediction_never_hurts():
    text = "edema and drusen"
    gold = Corpus([Document("d", text, [
        entity("T1", "Finding", 0, 5, text),
        entity("T2", "Finding", 10, 16, text)], [])])
    partial = Corpus([Document("d", text, [entity("T1", "Finding", 0, 5, text)], [])])
    fuller = Corpus([Document("d", text, [
        entity("T1", "Finding", 0, 5, text),
        entity("T2", "Finding", 10, 16, text)], [])])
    before = evaluate_entities(partial, gold).row("Finding")
    after = evaluate_entities(fuller, gold).row("Finding")
    assert after.tp >= before.tp
    assert after.recall >= before.recall
    assert after.precision >= before.precision  # fp unchanged here


def test_micro_macro_aggregates():
    text = "aa bb cc"
    gold = Corpus([Document("d", text, [
        entity("T1", "Finding", 0, 2, text),
        entity("T2", "Anatomy", 3, 5, text)], [])])
    pred = Corpus([Document("d", text, [
        entity("T1", "Finding", 0, 2, text),
        entity("T2", "Anatomy", 6, 8, text)], [])])
    report = evaluate_entities(pred, gold)
    micro_p, micro_r, micro_f = report.micro()
    assert micro_p == micro_r == pytest.approx(0.5)
    macro_p, _macro_r, macro_f = report.macro()
    assert macro_p == pytest.approx(0.5)
    assert 0.0 <= micro_f <= 1.0 and 0.0 <= macro_f <= 1.0


# --- randomized equivalence with the quadratic oracle ------------------------------

def random_corpus_pair(rng: random.Random) -> tuple[Corpus, Corpus]:
    """Small random gold/pred pair; entities unique per (span, type) within a
    document, as schema validation guarantees upstream."""

    def random_doc(doc_id: str, mutate_from: Document | None = None) -> Document:
        if mutate_from is None:
            words = [f"w{i}" for i in range(rng.randint(4, 10))]
            text = " ".join(words)
            keys = set()
            entities = []
            for i in range(rng.randint(0, 6)):
                wi = rng.randrange(len(words))
                start = sum(len(w) + 1 for w in words[:wi])
                span = (start, start + len(words[wi]))
                etype = rng.choice(ENTITY_TYPE_NAMES)
                if (span, etype) in keys:
                    continue
                keys.add((span, etype))
                entities.append(EntityAnnotation(
                    f"T{len(entities)+1}", etype, Span.contiguous(*span),
                    text[span[0]:span[1]]))
            elements = []
            anchors = [e for e in entities if e.etype in ("SpatialTrigger", "Finding", "Procedure", "Drug")]
            for _ in range(rng.randint(0, 4)):
                if not anchors or len(entities) < 2:
                    break
                anchor = rng.choice(anchors)
                filler = rng.choice([e for e in entities if e.id != anchor.id])
                elements.append(FrameElementInstance(
                    rng.choice(ELEMENT_TYPE_NAMES), anchor.id, filler.id))
            return Document(doc_id, text, entities, elements)
        # prediction: keep, drop, or retype parts of gold
        entities = []
        keys = set()
        for ent in mutate_from.entities:
            roll = rng.random()
            if roll < 0.6:
                candidate = ent
            elif roll < 0.8:
                continue
            else:
                candidate = EntityAnnotation(ent.id, rng.choice(ENTITY_TYPE_NAMES),
                                             ent.span, ent.surface)
            if (candidate.fragments, candidate.etype) in keys:
                continue
            keys.add((candidate.fragments, candidate.etype))
            entities.append(candidate)
        kept = {e.id for e in entities}
        elements = [inst for inst in mutate_from.elements
                    if inst.anchor_id in kept and inst.filler_id in kept
                    and rng.random() < 0.8]
        return Document(mutate_from.doc_id, mutate_from.text, entities, elements)

    golds, preds = [], []
    for d in range(rng.randint(1, 2)):
        gold = random_doc(f"doc{d}")
        golds.append(gold)
        preds.append(random_doc(f"doc{d}", mutate_from=gold))
    return Corpus(preds), Corpus(golds)


@pytest.mark.parametrize("matching", ["strict", "span-only"])
def test_hash_evaluator_equals_quadratic_oracle(matching):
    rng = random.Random(4242)
    for _ in range(150):
        pred, gold = random_corpus_pair(rng)
        fast = evaluate_all(pred, gold, anchor_matching=matching)
        slow = brute_force_check(pred, gold, anchor_matching=matching)
        assert fast.tallies() == slow.tallies()
