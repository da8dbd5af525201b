"""Command-line entry point.

Subcommands: validate, stats, agreement, split, export-qa, extract,
evaluate, synth.  Exit codes: 0 success, 1 validation violations found,
2 usage or configuration error, 3 backend failure.  Every subcommand takes
`--format table|json`.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .agreement import agreement_f1
from .backends import OracleBackend, RemoteBackend
from .brat import read_corpus, write_brat_dir
from .errors import BackendError, ConfigError, EyeframesError
from .evaluation import evaluate_all, format_report
from .model import Corpus
from .pipeline import ExtractionConfig, run_pipeline
from .queries import export_qa_records, get_default_templates, load_templates, write_qa_records
from .schema import get_default_attachment_map, load_attachment_map, validate_annotation_set
from .split import split_corpus
from .stats import compute_stats, format_stats
from .synth import GeneratorConfig, generate, generate_dual_layer

ENDPOINT_ENV = "EYEFRAMES_ENDPOINT"

_CONFIG_KEYS = {
    "corpus", "templates", "attachment_map", "endpoint",
    "max_tokens", "overlap", "seed", "jobs",
}


def load_tool_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(obj) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("corpus", "templates", "attachment_map"):
        if key in obj and not Path(obj[key]).exists():
            raise ConfigError(f"config {key} points to a missing path: {obj[key]}")
    return obj


def _setting(args, config: dict, name: str, default=None):
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    return config.get(name, default)


def _templates(args, config):
    path = _setting(args, config, "templates")
    return load_templates(path) if path else get_default_templates()


def _attachment(args, config):
    path = _setting(args, config, "attachment_map")
    return load_attachment_map(path) if path else get_default_attachment_map()


def _emit(args, table: str, obj) -> None:
    if args.format == "json":
        print(json.dumps(obj, indent=2, ensure_ascii=False))
    else:
        print(table)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eyeframes",
        description="Frame-semantic spatial annotation toolkit for ophthalmology notes",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON config file with shared defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, corpus=True):
        if corpus:
            p.add_argument("--corpus", help="corpus directory (standoff pairs) or .jsonl file")
        p.add_argument("--format", choices=("table", "json"), default="table")
        p.add_argument("--templates", help="query template table (JSON)")
        p.add_argument("--attachment-map", dest="attachment_map",
                       help="frame attachment map (JSON)")

    p = sub.add_parser("validate", help="schema-validate a corpus")
    common(p)

    p = sub.add_parser("stats", help="corpus statistics")
    common(p)

    p = sub.add_parser("agreement", help="pairwise annotator agreement")
    p.add_argument("--a", required=True, help="reference layer corpus")
    p.add_argument("--b", required=True, help="second layer corpus")
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("split", help="deterministic train/dev/test split")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--sizes", default="450,50,100",
                   help="train,dev,test sizes (must sum to the corpus size)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("export-qa", help="export gold question-answering records")
    common(p)
    p.add_argument("--out", required=True, help="output .jsonl path")
    p.add_argument("--max-tokens", dest="max_tokens", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--markers", choices=("on", "off"), default="off")
    p.add_argument("--turns", default="1,2", help="which turns to export")

    p = sub.add_parser("extract", help="run the two-turn extraction pipeline")
    common(p)
    p.add_argument("--backend", choices=("oracle", "remote"), default="oracle")
    p.add_argument("--endpoint", help="remote backend base URL")
    p.add_argument("--anchors", choices=("predicted", "gold"), default="predicted")
    p.add_argument("--max-tokens", dest="max_tokens", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--markers", choices=("on", "off"), default="off")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True, help="output directory for predictions")

    p = sub.add_parser("evaluate", help="exact-match scoring of predictions")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--anchor-matching", dest="anchor_matching",
                   choices=("strict", "span-only"), default="strict")
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("synth", help="generate a synthetic gold corpus")
    p.add_argument("--seed", type=int)
    p.add_argument("--notes", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--dual", action="store_true", help="emit a second perturbed layer")
    p.add_argument("--rate", type=float, default=0.2, help="dual-layer disagreement rate")
    p.add_argument("--mode", choices=("drop", "shift", "retype", "mixed"), default="drop")
    p.add_argument("--disc-rate", dest="disc_rate", type=float, default=0.0,
                   help="probability of a discontinuous-span sentence per note")
    p.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def cmd_validate(args, config) -> int:
    corpus = read_corpus(_require_corpus(args, config))
    amap = _attachment(args, config)
    violations = [v for doc in corpus.documents for v in validate_annotation_set(doc, amap)]
    obj = {"violations": [
        {"code": v.code.value, "doc_id": v.doc_id, "subject": v.subject, "message": v.message}
        for v in violations
    ]}
    table = "\n".join(str(v) for v in violations) or "no violations"
    _emit(args, table, obj)
    return 1 if violations else 0


def cmd_stats(args, config) -> int:
    corpus = read_corpus(_require_corpus(args, config))
    stats = compute_stats(corpus)
    _emit(args, format_stats(stats), stats.to_obj())
    return 0


def cmd_agreement(args, config) -> int:
    layer_a = read_corpus(args.a)
    layer_b = read_corpus(args.b)
    report = agreement_f1(layer_a, layer_b)
    _emit(args, format_report(report), report.to_obj())
    return 0


def cmd_split(args, config) -> int:
    corpus = read_corpus(_require_corpus(args, config))
    try:
        sizes = tuple(int(s) for s in args.sizes.split(","))
    except ValueError:
        raise ConfigError(f"unparsable --sizes {args.sizes!r}") from None
    if len(sizes) != 3:
        raise ConfigError("--sizes needs exactly three comma-separated integers")
    seed = _setting(args, config, "seed", 13)
    train, dev, test = split_corpus(corpus, seed, sizes)
    out = Path(args.out)
    for name, part in (("train", train), ("dev", dev), ("test", test)):
        write_brat_dir(part, out / name)
    obj = {
        "seed": seed,
        "sizes": {"train": len(train), "dev": len(dev), "test": len(test)},
        "train": [d.doc_id for d in train.documents],
        "dev": [d.doc_id for d in dev.documents],
        "test": [d.doc_id for d in test.documents],
    }
    _emit(args, f"wrote {len(train)}/{len(dev)}/{len(test)} documents under {out}", obj)
    return 0


def cmd_export_qa(args, config) -> int:
    corpus = read_corpus(_require_corpus(args, config))
    templates = _templates(args, config)
    amap = _attachment(args, config)
    try:
        turns = tuple(int(t) for t in args.turns.split(","))
    except ValueError:
        raise ConfigError(f"unparsable --turns {args.turns!r}") from None
    records = []
    for doc in corpus.documents:
        records.extend(export_qa_records(
            doc, templates, amap,
            max_tokens=_setting(args, config, "max_tokens", 128),
            overlap=_setting(args, config, "overlap", 32),
            markers=args.markers == "on",
            turns=turns))
    count = write_qa_records(records, args.out)
    _emit(args, f"wrote {count} records to {args.out}",
          {"records": count, "path": args.out})
    return 0


def cmd_extract(args, config) -> int:
    corpus = read_corpus(_require_corpus(args, config))
    templates = _templates(args, config)
    amap = _attachment(args, config)
    pipeline_config = ExtractionConfig(
        max_tokens=_setting(args, config, "max_tokens", 128),
        overlap=_setting(args, config, "overlap", 32),
        anchor_mode=args.anchors,
        markers=args.markers == "on",
        attachment=amap,
        templates=templates,
    )
    if args.backend == "remote":
        endpoint = args.endpoint or os.environ.get(ENDPOINT_ENV) or config.get("endpoint")
        if not endpoint:
            raise ConfigError("remote backend needs --endpoint, config endpoint, "
                              f"or ${ENDPOINT_ENV}")
        remote = RemoteBackend(endpoint)
        backend_factory = lambda doc: remote  # noqa: E731 - shared client
    else:
        backend_factory = lambda doc: OracleBackend(doc, templates, amap)  # noqa: E731

    results = run_pipeline(corpus, backend_factory, pipeline_config,
                           jobs=_setting(args, config, "jobs", 1))
    out = Path(args.out)
    predicted = [r.document for r in results if r.document is not None]
    write_brat_dir(predicted, out)
    provenance = {
        r.doc_id: {
            "error": r.error,
            "error_kind": r.error_kind,
            "predictions": [
                {"record_id": p.record_id, "backend": p.backend,
                 "window": list(p.window), "ambiguous": p.ambiguous}
                for p in r.provenance
            ],
        }
        for r in results
    }
    (out / "provenance.json").write_text(
        json.dumps(provenance, indent=2, ensure_ascii=False), encoding="utf-8")
    failed = [r for r in results if r.failed]
    table = (f"extracted {len(predicted)}/{len(results)} documents to {out}"
             + (f"; {len(failed)} failed" if failed else ""))
    _emit(args, table, {"extracted": len(predicted), "failed": len(failed), "out": str(out)})
    return 3 if failed else 0


def cmd_evaluate(args, config) -> int:
    pred = read_corpus(args.pred)
    gold = read_corpus(args.gold)
    report = evaluate_all(pred, gold, anchor_matching=args.anchor_matching)
    _emit(args, format_report(report), report.to_obj())
    return 0


def cmd_synth(args, config) -> int:
    seed = _setting(args, config, "seed", 0)
    gen_config = GeneratorConfig(seed=seed, note_count=args.notes,
                                 discontinuous_rate=args.disc_rate)
    out = Path(args.out)
    if args.dual:
        corpus = generate_dual_layer(gen_config, args.rate, mode=args.mode)
        write_brat_dir(Corpus(corpus.documents), out / "layer_a")
        write_brat_dir(Corpus(corpus.second_layer), out / "layer_b")
        table = f"wrote {len(corpus.documents)} dual-layer notes under {out}"
    else:
        corpus = generate(gen_config)
        write_brat_dir(corpus, out)
        table = f"wrote {len(corpus.documents)} notes to {out}"
    _emit(args, table, {"notes": len(corpus.documents), "seed": seed, "out": str(out)})
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "stats": cmd_stats,
    "agreement": cmd_agreement,
    "split": cmd_split,
    "export-qa": cmd_export_qa,
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
}


def _require_corpus(args, config) -> str:
    path = _setting(args, config, "corpus")
    if not path:
        raise ConfigError("no corpus given (flag --corpus or config key)")
    return path


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_tool_config(args.config)
        return _COMMANDS[args.command](args, config)
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3
    except (EyeframesError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
