#!/usr/bin/env python3
"""End-to-end demo: synthesize a gold corpus, run the two-turn pipeline
against the gold oracle, and print the exact-match score table (expected:
F1 = 1.000 on every populated row)."""
from __future__ import annotations

import argparse
import time

from eyeframes.backends import OracleBackend
from eyeframes.evaluation import evaluate_all, format_report
from eyeframes.model import Corpus
from eyeframes.pipeline import ExtractionConfig, run_pipeline
from eyeframes.synth import GeneratorConfig, generate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20240613)
    parser.add_argument("--notes", type=int, default=100)
    parser.add_argument("--max-tokens", type=int, default=128)
    parser.add_argument("--overlap", type=int, default=32)
    parser.add_argument("--no-markers", action="store_true",
                        help="disable anchor markers to see ambiguity effects")
    args = parser.parse_args()

    started = time.monotonic()
    corpus = generate(GeneratorConfig(seed=args.seed, note_count=args.notes))
    config = ExtractionConfig(max_tokens=args.max_tokens, overlap=args.overlap,
                              markers=not args.no_markers)
    results = run_pipeline(corpus, lambda doc: OracleBackend(doc), config)
    failed = [r for r in results if r.failed]
    predicted = Corpus([r.document for r in results if r.document is not None])
    report = evaluate_all(predicted, Corpus([d for d in corpus.documents
                                             if d.doc_id in {p.doc_id for p in predicted.documents}]))
    print(format_report(report))
    ambiguous = sum(1 for r in results for p in r.provenance if p.ambiguous)
    print(f"\n{args.notes} notes in {time.monotonic() - started:.1f}s; "
          f"{len(failed)} failed; {ambiguous} ambiguous predictions")


if __name__ == "__main__":
    main()
