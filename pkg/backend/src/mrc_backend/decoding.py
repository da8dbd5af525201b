"""Multi-span decoding from start/end probabilities.

Candidate spans pair a start position with an end position at most
`max_answer_tokens` later; the span score is the geometric mean of the two
probabilities.  Spans at or above the threshold are kept greedily by score
without overlaps, so zero spans (no answer) and several spans per query both
fall out naturally.
"""
from __future__ import annotations

from .tokenizer import Token


def decode_spans(start_probs: list[float], end_probs: list[float],
                 tokens: list[Token], threshold: float,
                 max_answer_tokens: int = 8) -> list[tuple[int, int, float]]:
    """(char_start, char_end, score) triples in score order, non-overlapping."""
    candidates: list[tuple[float, int, int]] = []
    n = len(tokens)
    for i in range(n):
        if start_probs[i] * max(end_probs[i:min(n, i + max_answer_tokens)],
                                default=0.0) < threshold ** 2:
            continue
        for j in range(i, min(n, i + max_answer_tokens)):
            score = (start_probs[i] * end_probs[j]) ** 0.5
            if score >= threshold:
                candidates.append((score, i, j))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    taken: list[tuple[int, int]] = []
    out: list[tuple[int, int, float]] = []
    for score, i, j in candidates:
        if any(i <= tj and ti <= j for ti, tj in taken):
            continue
        taken.append((i, j))
        out.append((tokens[i].start, tokens[j].end, min(score, 1.0)))
    return out
