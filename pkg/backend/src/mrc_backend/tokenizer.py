"""Word-level tokenizer with character offsets and a trainable vocabulary.

Splits on whitespace, peels leading/trailing punctuation into their own
tokens, keeps interior punctuation ("20/25", "0.4") intact.  Offsets are code
points into the original string, which is what the wire protocol requires the
service to answer in.
"""
from __future__ import annotations

import json
import re
import string
from pathlib import Path
from typing import NamedTuple

_CHUNK = re.compile(r"\S+")
_PUNCT = set(string.punctuation)

PAD, UNK, CLS, SEP = "[PAD]", "[UNK]", "[CLS]", "[SEP]"
SPECIALS = (PAD, UNK, CLS, SEP)


class Token(NamedTuple):
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    for match in _CHUNK.finditer(text):
        chunk, start = match.group(), match.start()
        lo, hi = 0, len(chunk)
        head: list[Token] = []
        tail: list[Token] = []
        while lo < hi and chunk[lo] in _PUNCT:
            head.append(Token(chunk[lo], start + lo, start + lo + 1))
            lo += 1
        while hi > lo and chunk[hi - 1] in _PUNCT:
            tail.append(Token(chunk[hi - 1], start + hi - 1, start + hi))
            hi -= 1
        tokens.extend(head)
        if hi > lo:
            tokens.append(Token(chunk[lo:hi], start + lo, start + hi))
        tokens.extend(reversed(tail))
    return tokens


class Vocab:
    def __init__(self, words: list[str]):
        self.itos = list(SPECIALS) + [w for w in words if w not in SPECIALS]
        self.stoi = {w: i for i, w in enumerate(self.itos)}

    def __len__(self) -> int:
        return len(self.itos)

    def id(self, word: str) -> int:
        return self.stoi.get(word, self.stoi[UNK])

    @classmethod
    def build(cls, texts: list[str]) -> "Vocab":
        seen: dict[str, None] = {}
        for text in texts:
            for token in tokenize(text):
                seen.setdefault(token.text)
        return cls(sorted(seen))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.itos, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        itos = json.loads(Path(path).read_text(encoding="utf-8"))
        vocab = cls([])
        vocab.itos = itos
        vocab.stoi = {w: i for i, w in enumerate(itos)}
        return vocab
