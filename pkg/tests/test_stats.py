from __future__ import annotations

import pytest

from eyeframes.errors import EmptyCorpus
from eyeframes.model import Corpus, Document
from eyeframes.stats import compute_stats
from eyeframes.synth import GeneratorConfig, generate

from conftest import entity


def _trigger_doc(doc_id, text, triggers):
    entities = [entity(f"T{i+1}", "SpatialTrigger", s, e, text)
                for i, (s, e) in enumerate(triggers)]
    return Document(doc_id, text, entities, [])


def test_trigger_counts_and_casefold_uniques():
    d1 = _trigger_doc("a", "edema in the eye of note", [(6, 8), (17, 19)])   # in, of
    d2 = _trigger_doc("b", "pain In the orbit", [(5, 7)])                     # In
    stats = compute_stats(Corpus([d1, d2]))
    assert stats.entity_counts["SpatialTrigger"] == 3
    assert stats.unique_trigger_count == 2


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        compute_stats(Corpus([]))


def test_unannotated_document_counts_zero():
    stats = compute_stats(Corpus([Document("a", "no annotations here", [], [])]))
    assert stats.entity_counts == {}
    assert stats.element_counts == {}
    assert stats.unique_trigger_count == 0
    assert stats.avg_note_tokens == 3.0


def test_averages(edema_corpus):
    stats = compute_stats(edema_corpus)
    # "mild disc edema in the left eye." = 7 words + final period
    assert stats.avg_note_tokens == 8.0
    assert stats.avg_sentence_tokens == 8.0
    assert stats.element_counts["Figure"] == 1


def test_counts_additive_over_documents():
    corpus = generate(GeneratorConfig(seed=5, note_count=6))
    whole = compute_stats(corpus)
    per_doc = [compute_stats(Corpus([d])) for d in corpus.documents]
    for etype, count in whole.entity_counts.items():
        assert count == sum(s.entity_counts.get(etype, 0) for s in per_doc)
    for element, count in whole.element_counts.items():
        assert count == sum(s.element_counts.get(element, 0) for s in per_doc)
