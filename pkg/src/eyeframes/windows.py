"""Sliding context windows over a note, aligned to token boundaries.

Windows advance with stride = max_tokens - overlap, so consecutive windows
share exactly `overlap` tokens; the last window simply truncates at the end
of the note.  Any span of at most `overlap` tokens is therefore fully inside
at least one window; longer spans can fall across every boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import AnchorTooLong
from .model import Span
from .tokenization import Token, tokenize


@dataclass(frozen=True)
class ContextWindow:
    index: int
    token_start: int
    token_end: int
    char_start: int
    char_end: int

    def contains(self, span: Span) -> bool:
        return span.within(self.char_start, self.char_end)

    def slice(self, text: str) -> str:
        return text[self.char_start:self.char_end]


def _window_from_tokens(tokens: list[Token], index: int, lo: int, hi: int) -> ContextWindow:
    return ContextWindow(index, lo, hi, tokens[lo].start, tokens[hi - 1].end)


def window_context(text: str, anchor: Span | None = None,
                   max_tokens: int = 128, overlap: int = 32,
                   tokens: list[Token] | None = None) -> list[ContextWindow]:
    """Covering windows; with an anchor, one window fully contains the anchor
    span, centered on it when the note edges allow."""
    if overlap < 0 or max_tokens <= overlap:
        raise ValueError("need max_tokens > overlap >= 0")
    if tokens is None:
        tokens = tokenize(text)
    n = len(tokens)
    if n == 0:
        return []

    stride = max_tokens - overlap
    starts = [0]
    while starts[-1] + max_tokens < n:
        starts.append(starts[-1] + stride)
    bounds = [(lo, min(lo + max_tokens, n)) for lo in starts]

    if anchor is not None:
        covering = [i for i, tok in enumerate(tokens)
                    if tok.end > anchor.start and tok.start < anchor.end]
        if not covering:
            # anchor sits in whitespace-only territory; treat nearest token
            covering = [min(range(n), key=lambda i: abs(tokens[i].start - anchor.start))]
        ai, aj = covering[0], covering[-1] + 1
        if aj - ai > max_tokens:
            raise AnchorTooLong(
                f"anchor spans {aj - ai} tokens but windows hold {max_tokens}")
        center_lo = ai - (max_tokens - (aj - ai)) // 2
        center_lo = max(0, min(center_lo, n - max_tokens if n > max_tokens else 0))
        centered = (center_lo, min(center_lo + max_tokens, n))
        if centered not in bounds:
            bounds.append(centered)
        bounds.sort()

    return [_window_from_tokens(tokens, i, lo, hi) for i, (lo, hi) in enumerate(bounds)]


def windows_containing(windows: list[ContextWindow], span: Span) -> list[ContextWindow]:
    return [w for w in windows if w.contains(span)]
