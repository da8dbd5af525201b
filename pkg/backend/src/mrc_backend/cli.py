"""Training and serving commands.

    mrc-backend train --records FILE --out DIR [--epochs 10 --lr 2e-5
                      --max-len 128 --seed N --base-model builtin:small]
                      [--pretrain-records FILE | --init-from DIR]
    mrc-backend serve --model DIR --port P [--host H]
"""
from __future__ import annotations

import argparse
import sys

from .records import EmptyTrainingSet, SequenceOverflow, load_records
from .training import TrainConfig, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrc-backend", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune the reader on exported records")
    p.add_argument("--records", required=True, help="training records (.jsonl)")
    p.add_argument("--out", required=True, help="artifact output directory")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=2e-5)
    p.add_argument("--max-len", dest="max_len", type=int, default=128)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=64)
    p.add_argument("--neg-ratio", dest="neg_ratio", type=float, default=3.0)
    p.add_argument("--base-model", dest="base_model", default="builtin:small")
    p.add_argument("--threshold", type=float, default=None,
                   help="fixed null threshold; default: tuned on a dev slice")
    p.add_argument("--pretrain-records", dest="pretrain_records", default=None,
                   help="stage-1 records for sequential fine-tuning")
    p.add_argument("--init-from", dest="init_from", default=None,
                   help="continue from an existing artifact")

    p = sub.add_parser("serve", help="serve a trained artifact")
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        cfg = TrainConfig(
            base_model=args.base_model, epochs=args.epochs, lr=args.lr,
            max_len=args.max_len, seed=args.seed, batch_size=args.batch_size,
            neg_ratio=args.neg_ratio, threshold=args.threshold,
            init_from=args.init_from, pretrain_records=args.pretrain_records)
        try:
            records = load_records(args.records)
            pretrain = load_records(args.pretrain_records) if args.pretrain_records else None
            out = train(records, cfg, args.out, pretrain=pretrain)
        except (EmptyTrainingSet, SequenceOverflow, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"saved artifact to {out}")
        return 0
    if args.command == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(args.model), host=args.host, port=args.port,
                    log_level="warning")
        return 0
    return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
