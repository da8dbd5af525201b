"""Deterministic whitespace-plus-punctuation tokenizer.

Rule: split on whitespace, then peel leading and trailing punctuation
characters off each chunk as single-character tokens.  Interior punctuation
stays put, so measurements like "20/25" and "0.4" survive as one token.
Sentence boundaries are a newline or a period followed by a space.
"""
from __future__ import annotations

import re
import string
from typing import NamedTuple

_CHUNK = re.compile(r"\S+")
_PUNCT = set(string.punctuation)


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


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) extents of sentences; boundary = newline or ". "."""
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            spans.append((start, i))
            start = i + 1
        elif ch == "." and i + 1 < n and text[i + 1] == " ":
            spans.append((start, i + 1))
            start = i + 1
        i += 1
    spans.append((start, n))
    return [(s, e) for s, e in spans if text[s:e].strip()]


def token_count(text: str) -> int:
    return len(tokenize(text))
