"""Transformer encoder with independent start/end tagging heads.

Multi-answer extraction: every context position gets an independent
probability of opening and of closing an answer span, so several spans can
fire for one query and none fire for no-answer queries.
"""
from __future__ import annotations

import torch
from torch import nn

ARCHITECTURES = {
    "builtin:small": dict(d_model=128, heads=4, layers=2, ff=256),
    "builtin:tiny": dict(d_model=64, heads=2, layers=1, ff=128),
}


class SpanReader(nn.Module):
    def __init__(self, vocab_size: int, max_len: int,
                 d_model: int = 128, heads: int = 4, layers: int = 2,
                 ff: int = 256, dropout: float = 0.1):
        super().__init__()
        self.token_embedding = nn.Embedding(vocab_size, d_model, padding_idx=0)
        self.position_embedding = nn.Embedding(max_len, d_model)
        self.segment_embedding = nn.Embedding(2, d_model)
        self.norm = nn.LayerNorm(d_model)
        self.dropout = nn.Dropout(dropout)
        layer = nn.TransformerEncoderLayer(
            d_model=d_model, nhead=heads, dim_feedforward=ff,
            dropout=dropout, batch_first=True, norm_first=True)
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)
        self.start_head = nn.Linear(d_model, 1)
        self.end_head = nn.Linear(d_model, 1)
        self.max_len = max_len

    def forward(self, ids: torch.Tensor, segments: torch.Tensor,
                mask: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        hidden = (self.token_embedding(ids)
                  + self.position_embedding(positions)
                  + self.segment_embedding(segments))
        hidden = self.dropout(self.norm(hidden))
        hidden = self.encoder(hidden, src_key_padding_mask=~mask)
        return self.start_head(hidden).squeeze(-1), self.end_head(hidden).squeeze(-1)


def build_model(base_model: str, vocab_size: int, max_len: int) -> SpanReader:
    if base_model not in ARCHITECTURES:
        raise ValueError(
            f"unknown base model {base_model!r}; this build has no model-hub "
            f"access, supported: {', '.join(sorted(ARCHITECTURES))}")
    return SpanReader(vocab_size, max_len, **ARCHITECTURES[base_model])
