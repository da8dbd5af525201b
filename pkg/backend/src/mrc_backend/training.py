"""Training loop, artifact IO, and the inference Reader."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .decoding import decode_spans
from .model import build_model
from .records import Encoded, EmptyTrainingSet, QARecord, SequenceOverflow, encode
from .tokenizer import Vocab, tokenize


@dataclass
class TrainConfig:
    base_model: str = "builtin:small"
    epochs: int = 10
    lr: float = 2e-5
    max_len: int = 128
    seed: int = 13
    batch_size: int = 64
    neg_ratio: float = 3.0
    pos_weight: float = 8.0
    threshold: float | None = None
    max_answer_tokens: int = 8
    dev_fraction: float = 0.05
    init_from: str | None = None
    pretrain_records: str | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.max_len < 8:
            raise ValueError("max_len too small")


def _fingerprint(config: dict, vocab: Vocab) -> str:
    digest = hashlib.sha256()
    digest.update(json.dumps(config, sort_keys=True).encode())
    digest.update("\x00".join(vocab.itos).encode())
    return digest.hexdigest()[:16]


def _batches(encoded: list[Encoded], batch_size: int, device: torch.device):
    for lo in range(0, len(encoded), batch_size):
        chunk = encoded[lo:lo + batch_size]
        width = max(len(e.ids) for e in chunk)
        ids = torch.zeros((len(chunk), width), dtype=torch.long)
        segments = torch.zeros((len(chunk), width), dtype=torch.long)
        mask = torch.zeros((len(chunk), width), dtype=torch.bool)
        starts = torch.zeros((len(chunk), width))
        ends = torch.zeros((len(chunk), width))
        label_mask = torch.zeros((len(chunk), width), dtype=torch.bool)
        for row, enc in enumerate(chunk):
            n = len(enc.ids)
            ids[row, :n] = torch.tensor(enc.ids)
            segments[row, :n] = torch.tensor(enc.segments)
            mask[row, :n] = True
            slot_lo, slot_hi = enc.context_slot
            label_mask[row, slot_lo:slot_hi] = True
            if enc.start_labels:
                starts[row, slot_lo:slot_hi] = torch.tensor(enc.start_labels, dtype=torch.float)
                ends[row, slot_lo:slot_hi] = torch.tensor(enc.end_labels, dtype=torch.float)
        yield (ids.to(device), segments.to(device), mask.to(device),
               starts.to(device), ends.to(device), label_mask.to(device), chunk)


def _select_training_records(records: list[QARecord], neg_ratio: float,
                             rng: random.Random) -> list[QARecord]:
    positives = [r for r in records if r.answers]
    negatives = [r for r in records if not r.answers]
    if not positives:
        raise EmptyTrainingSet("no positive examples in the training records")
    keep = min(len(negatives), int(neg_ratio * len(positives)))
    sampled = rng.sample(negatives, keep) if keep < len(negatives) else negatives
    combined = positives + sampled
    rng.shuffle(combined)
    return combined


def _train_stage(model, encoded: list[Encoded], cfg: TrainConfig,
                 device: torch.device, rng: random.Random) -> None:
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.lr)
    # positive token positions are rare; the weight keeps the heads from
    # collapsing to all-negative
    loss_fn = nn.BCEWithLogitsLoss(reduction="none",
                                   pos_weight=torch.tensor(cfg.pos_weight))
    model.train()
    order = list(encoded)
    for _epoch in range(cfg.epochs):
        rng.shuffle(order)
        for ids, segments, mask, starts, ends, label_mask, _chunk in _batches(
                order, cfg.batch_size, device):
            optimizer.zero_grad()
            start_logits, end_logits = model(ids, segments, mask)
            raw = loss_fn(start_logits, starts) + loss_fn(end_logits, ends)
            loss = (raw * label_mask).sum() / label_mask.sum().clamp(min=1)
            loss.backward()
            optimizer.step()


def train(records: list[QARecord], cfg: TrainConfig, out_dir: str | Path,
          pretrain: list[QARecord] | None = None) -> Path:
    """Fit the reader on exported records and save the artifact.

    With `pretrain` records (or cfg.pretrain_records via the CLI), training
    runs two sequential fine-tuning stages sharing one vocabulary."""
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)
    device = torch.device("cpu")

    all_records = list(records) + list(pretrain or [])
    query_lengths = {r.query: len(tokenize(r.query)) for r in all_records}
    longest = max(query_lengths.values(), default=0)
    if longest + 3 > cfg.max_len:
        raise SequenceOverflow(
            f"longest query has {longest} tokens; max_len={cfg.max_len} cannot "
            f"fit it plus the special positions")
    if cfg.init_from:
        vocab = Vocab.load(Path(cfg.init_from) / "vocab.json")
    else:
        vocab = Vocab.build([r.query for r in all_records]
                            + [r.context for r in all_records])

    model = build_model(cfg.base_model, len(vocab), cfg.max_len)
    if cfg.init_from:
        state = torch.load(Path(cfg.init_from) / "weights.pt", map_location=device)
        model.load_state_dict(state)
    model.to(device)

    def prepare(subset: list[QARecord]) -> tuple[list[Encoded], list[QARecord]]:
        # dev keeps the natural positive/negative mix so the tuned threshold
        # is calibrated for inference-time inputs; only the training part is
        # negative-downsampled
        pool = list(subset)
        rng.shuffle(pool)
        dev_n = min(max(1, int(cfg.dev_fraction * len(pool))), 4000)
        dev, rest = pool[:dev_n], pool[dev_n:]
        selected = _select_training_records(rest, cfg.neg_ratio, rng)
        encoded = [encode(r.query, r.context, vocab, cfg.max_len, r.answers,
                          r.record_id) for r in selected]
        return encoded, dev

    if pretrain:
        stage_encoded, _ = prepare(pretrain)
        _train_stage(model, stage_encoded, cfg, device, rng)
    encoded, dev_records = prepare(records)
    _train_stage(model, encoded, cfg, device, rng)

    reader = Reader(model, vocab, cfg.max_len, threshold=cfg.threshold or 0.5,
                    max_answer_tokens=cfg.max_answer_tokens)
    threshold = cfg.threshold
    if threshold is None:
        threshold = _tune_threshold(reader, dev_records)
        reader.threshold = threshold

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = {
        "base_model": cfg.base_model,
        "max_len": cfg.max_len,
        "threshold": threshold,
        "max_answer_tokens": cfg.max_answer_tokens,
        "seed": cfg.seed,
        "epochs": cfg.epochs,
        "lr": cfg.lr,
    }
    config["fingerprint"] = _fingerprint(config, vocab)
    (out / "config.json").write_text(json.dumps(config, indent=2), encoding="utf-8")
    vocab.save(out / "vocab.json")
    torch.save(model.state_dict(), out / "weights.pt")
    return out


def _span_f1(predicted: list[tuple[int, int]], gold: tuple[tuple[int, int], ...]) -> tuple[int, int, int]:
    pred_set, gold_set = set(predicted), set(gold)
    tp = len(pred_set & gold_set)
    return tp, len(pred_set) - tp, len(gold_set) - tp


def _tune_threshold(reader: "Reader", dev: list[QARecord]) -> float:
    """Null-answer threshold maximizing exact-span micro-F1 on the dev slice."""
    probed = [reader.context_probs(r.query, r.context) for r in dev]
    best_threshold, best_f1 = 0.5, -1.0
    for step in range(1, 19):
        threshold = step * 0.05
        tp = fp = fn = 0
        for record, (starts, ends, tokens) in zip(dev, probed):
            spans = decode_spans(starts, ends, tokens, threshold,
                                 reader.max_answer_tokens)
            d_tp, d_fp, d_fn = _span_f1([(s, e) for s, e, _ in spans], record.answers)
            tp, fp, fn = tp + d_tp, fp + d_fp, fn + d_fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        if f1 > best_f1:
            best_threshold, best_f1 = threshold, f1
    return best_threshold


class Reader:
    """Inference wrapper: encode, run the model, decode spans."""

    def __init__(self, model, vocab: Vocab, max_len: int,
                 threshold: float, max_answer_tokens: int):
        self.model = model
        self.vocab = vocab
        self.max_len = max_len
        self.threshold = threshold
        self.max_answer_tokens = max_answer_tokens
        self.model.eval()

    @classmethod
    def load(cls, model_dir: str | Path) -> "Reader":
        model_dir = Path(model_dir)
        config = json.loads((model_dir / "config.json").read_text(encoding="utf-8"))
        vocab = Vocab.load(model_dir / "vocab.json")
        model = build_model(config["base_model"], len(vocab), config["max_len"])
        model.load_state_dict(torch.load(model_dir / "weights.pt", map_location="cpu"))
        return cls(model, vocab, config["max_len"], config["threshold"],
                   config["max_answer_tokens"])

    @torch.no_grad()
    def context_probs(self, query: str, context: str):
        enc = encode(query, context, self.vocab, self.max_len)
        ids = torch.tensor([enc.ids])
        segments = torch.tensor([enc.segments])
        mask = torch.ones_like(ids, dtype=torch.bool)
        start_logits, end_logits = self.model(ids, segments, mask)
        lo, hi = enc.context_slot
        starts = torch.sigmoid(start_logits[0, lo:hi]).tolist()
        ends = torch.sigmoid(end_logits[0, lo:hi]).tolist()
        return starts, ends, enc.context_tokens

    def answer(self, query: str, context: str) -> list[tuple[int, int, str, float]]:
        return self.answer_many([(query, context)])[0]

    @torch.no_grad()
    def answer_many(self, pairs: list[tuple[str, str]],
                    batch_size: int = 64) -> list[list[tuple[int, int, str, float]]]:
        """Batched inference over (query, context) pairs, one answer list each."""
        results: list[list[tuple[int, int, str, float]]] = [[] for _ in pairs]
        todo: list[tuple[int, Encoded]] = []
        for idx, (query, context) in enumerate(pairs):
            if not context.strip():
                continue
            todo.append((idx, encode(query, context, self.vocab, self.max_len)))
        for lo in range(0, len(todo), batch_size):
            chunk = todo[lo:lo + batch_size]
            width = max(len(e.ids) for _i, e in chunk)
            ids = torch.zeros((len(chunk), width), dtype=torch.long)
            segments = torch.zeros((len(chunk), width), dtype=torch.long)
            mask = torch.zeros((len(chunk), width), dtype=torch.bool)
            for row, (_i, enc) in enumerate(chunk):
                n = len(enc.ids)
                ids[row, :n] = torch.tensor(enc.ids)
                segments[row, :n] = torch.tensor(enc.segments)
                mask[row, :n] = True
            start_logits, end_logits = self.model(ids, segments, mask)
            start_probs = torch.sigmoid(start_logits)
            end_probs = torch.sigmoid(end_logits)
            for row, (idx, enc) in enumerate(chunk):
                slot_lo, slot_hi = enc.context_slot
                spans = decode_spans(
                    start_probs[row, slot_lo:slot_hi].tolist(),
                    end_probs[row, slot_lo:slot_hi].tolist(),
                    enc.context_tokens, self.threshold, self.max_answer_tokens)
                context = pairs[idx][1]
                results[idx] = [(s, e, context[s:e], score) for s, e, score in spans]
        return results
