"""Exact-span-match scoring.

An entity prediction counts only when its span fragments and type equal a
gold annotation.  Frame element instances are scored two ways: "strict"
requires (element type, anchor span+type, filler span) to match; "span-only"
ignores the anchor.  Strict is the headline because second-turn predictions
are conditioned on an anchor.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import CorpusMismatch
from .model import Corpus, Document
from .schema import element_group

ENTITY_GROUP = "Entity"


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


@dataclass(frozen=True)
class MetricsRow:
    group: str
    label: str
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[2]


@dataclass
class MetricsReport:
    rows: list[MetricsRow] = field(default_factory=list)
    matching: str = "strict"

    def row(self, label: str, group: str | None = None) -> MetricsRow | None:
        for r in self.rows:
            if r.label == label and (group is None or r.group == group):
                return r
        return None

    def tallies(self) -> dict[tuple[str, str], tuple[int, int, int]]:
        return {(r.group, r.label): (r.tp, r.fp, r.fn) for r in self.rows}

    def micro(self) -> tuple[float, float, float]:
        tp = sum(r.tp for r in self.rows)
        fp = sum(r.fp for r in self.rows)
        fn = sum(r.fn for r in self.rows)
        return _prf(tp, fp, fn)

    def macro(self) -> tuple[float, float, float]:
        """Unweighted mean over rows; rows with no gold and no predicted
        instances are never present, so absent types do not dilute it."""
        if not self.rows:
            return 0.0, 0.0, 0.0
        n = len(self.rows)
        return (
            sum(r.precision for r in self.rows) / n,
            sum(r.recall for r in self.rows) / n,
            sum(r.f1 for r in self.rows) / n,
        )

    def to_obj(self) -> dict:
        micro_p, micro_r, micro_f = self.micro()
        macro_p, macro_r, macro_f = self.macro()
        return {
            "matching": self.matching,
            "rows": [
                {
                    "group": r.group, "type": r.label,
                    "tp": r.tp, "fp": r.fp, "fn": r.fn,
                    "precision": r.precision, "recall": r.recall, "f1": r.f1,
                }
                for r in self.rows
            ],
            "micro": {"precision": micro_p, "recall": micro_r, "f1": micro_f},
            "macro": {"precision": macro_p, "recall": macro_r, "f1": macro_f},
        }


def format_report(report: MetricsReport) -> str:
    lines = [f"{'group':<16} {'type':<22} {'TP':>5} {'FP':>5} {'FN':>5} {'P':>7} {'R':>7} {'F1':>7}"]
    for r in report.rows:
        lines.append(
            f"{r.group:<16} {r.label:<22} {r.tp:>5} {r.fp:>5} {r.fn:>5} "
            f"{r.precision:>7.4f} {r.recall:>7.4f} {r.f1:>7.4f}")
    micro = report.micro()
    macro = report.macro()
    lines.append(f"{'':<16} {'micro':<22} {'':>5} {'':>5} {'':>5} "
                 f"{micro[0]:>7.4f} {micro[1]:>7.4f} {micro[2]:>7.4f}")
    lines.append(f"{'':<16} {'macro':<22} {'':>5} {'':>5} {'':>5} "
                 f"{macro[0]:>7.4f} {macro[1]:>7.4f} {macro[2]:>7.4f}")
    return "\n".join(lines)


# --- keys ---------------------------------------------------------------------

def entity_items(doc: Document) -> list[tuple[str, tuple]]:
    """(type label, match key) pairs for every entity annotation."""
    return [(e.etype, (doc.doc_id, e.fragments, e.etype)) for e in doc.entities]


def element_items(doc: Document, anchor_matching: str,
                  include_filler_type: bool = False) -> list[tuple[str, tuple]]:
    emap = doc.entity_map()
    items = []
    for inst in doc.elements:
        anchor, filler = emap[inst.anchor_id], emap[inst.filler_id]
        filler_key = (filler.fragments, filler.etype) if include_filler_type else filler.fragments
        if anchor_matching == "strict":
            key = (doc.doc_id, inst.element, anchor.fragments, anchor.etype, filler_key)
        elif anchor_matching == "span-only":
            key = (doc.doc_id, inst.element, filler_key)
        else:
            raise ValueError(f"unknown anchor_matching {anchor_matching!r}")
        items.append((inst.element, key))
    return items


def _check_aligned(pred: Corpus, gold: Corpus) -> None:
    pred_docs, gold_docs = pred.by_id(), gold.by_id()
    if set(pred_docs) != set(gold_docs):
        raise CorpusMismatch("prediction and gold corpora carry different doc ids")
    for doc_id, gold_doc in gold_docs.items():
        if pred_docs[doc_id].text != gold_doc.text:
            raise CorpusMismatch(f"texts differ for {doc_id!r}")


def _tally(pred_items: list[tuple[str, tuple]], gold_items: list[tuple[str, tuple]],
           group_of) -> list[MetricsRow]:
    """Set-based tallies per type label."""
    pred_by_label: dict[str, set] = {}
    gold_by_label: dict[str, set] = {}
    for label, key in pred_items:
        pred_by_label.setdefault(label, set()).add(key)
    for label, key in gold_items:
        gold_by_label.setdefault(label, set()).add(key)
    rows = []
    for label in sorted(set(pred_by_label) | set(gold_by_label)):
        p = pred_by_label.get(label, set())
        g = gold_by_label.get(label, set())
        rows.append(MetricsRow(group_of(label), label, len(p & g), len(p - g), len(g - p)))
    return rows


def evaluate_entities(pred: Corpus, gold: Corpus) -> MetricsReport:
    _check_aligned(pred, gold)
    pred_items, gold_items = [], []
    for doc in pred.documents:
        pred_items.extend(entity_items(doc))
    for doc in gold.documents:
        gold_items.extend(entity_items(doc))
    rows = _tally(pred_items, gold_items, lambda _label: ENTITY_GROUP)
    return MetricsReport(rows, matching="exact")


def evaluate_elements(pred: Corpus, gold: Corpus,
                      anchor_matching: str = "strict") -> MetricsReport:
    _check_aligned(pred, gold)
    pred_items, gold_items = [], []
    for doc in pred.documents:
        pred_items.extend(element_items(doc, anchor_matching))
    for doc in gold.documents:
        gold_items.extend(element_items(doc, anchor_matching))
    rows = _tally(pred_items, gold_items, element_group)
    return MetricsReport(rows, matching=anchor_matching)


def evaluate_all(pred: Corpus, gold: Corpus,
                 anchor_matching: str = "strict") -> MetricsReport:
    """Entity rows followed by frame element rows in one report."""
    entity_report = evaluate_entities(pred, gold)
    element_report = evaluate_elements(pred, gold, anchor_matching)
    return MetricsReport(entity_report.rows + element_report.rows, matching=anchor_matching)


def brute_force_check(pred: Corpus, gold: Corpus,
                      anchor_matching: str = "strict") -> MetricsReport:
    """Independent quadratic re-count of the same tallies.

    Matches are found by exhaustive one-to-one pairing instead of set
    intersection; intended for small corpora as a cross-check of the
    hash-based evaluator.
    """
    _check_aligned(pred, gold)
    # rows are keyed by (group, label): "Quantity" names both an entity type
    # and a frame element type and the two must never pool
    pred_items: list[tuple[tuple[str, str], tuple]] = []
    gold_items: list[tuple[tuple[str, str], tuple]] = []
    for target, corpus_docs in ((pred_items, pred.documents), (gold_items, gold.documents)):
        for doc in corpus_docs:
            for label, key in entity_items(doc):
                target.append(((ENTITY_GROUP, label), key))
            for label, key in element_items(doc, anchor_matching):
                target.append(((element_group(label), label), key))

    def dedup(keys: list[tuple]) -> list[tuple]:
        # quadratic on purpose: this path must not share machinery with the
        # set-based evaluator it cross-checks
        out: list[tuple] = []
        for key in keys:
            if key not in out:
                out.append(key)
        return out

    row_ids = sorted({rid for rid, _ in pred_items} | {rid for rid, _ in gold_items})
    rows = []
    for group, label in row_ids:
        preds = dedup([key for rid, key in pred_items if rid == (group, label)])
        golds = dedup([key for rid, key in gold_items if rid == (group, label)])
        matched_gold = [False] * len(golds)
        tp = 0
        for pkey in preds:
            for j, gkey in enumerate(golds):
                if not matched_gold[j] and pkey == gkey:
                    matched_gold[j] = True
                    tp += 1
                    break
        rows.append(MetricsRow(group, label, tp, len(preds) - tp, len(golds) - tp))
    return MetricsReport(rows, matching=anchor_matching)
