"""A deliberately tiny transformer encoder for desk-scale MLM demos."""

from __future__ import annotations

import torch
from torch import nn

MODEL_PRESETS = {
    "tiny": dict(dim=64, heads=2, layers=2, feedforward=128, max_len=512),
}


class MiniMlmEncoder(nn.Module):
    """Token + position embeddings, a small encoder stack, and an LM head."""

    def __init__(
        self,
        vocab_size: int,
        dim: int = 64,
        heads: int = 2,
        layers: int = 2,
        feedforward: int = 128,
        max_len: int = 512,
    ):
        super().__init__()
        self.token_embedding = nn.Embedding(vocab_size, dim)
        self.position_embedding = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim,
            nhead=heads,
            dim_feedforward=feedforward,
            batch_first=True,
            dropout=0.0,
        )
        # nested-tensor fast path makes outputs depend on batch padding shape
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers, enable_nested_tensor=False)
        self.norm = nn.LayerNorm(dim)
        self.lm_head = nn.Linear(dim, vocab_size)

    def forward(self, input_ids: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(input_ids.shape[1], device=input_ids.device)
        hidden = self.token_embedding(input_ids) + self.position_embedding(positions)
        hidden = self.encoder(hidden, src_key_padding_mask=~attention_mask)
        return self.lm_head(self.norm(hidden))


def build_model(preset: str, vocab_size: int) -> MiniMlmEncoder:
    if preset not in MODEL_PRESETS:
        raise ValueError(f"unknown model preset {preset!r}, have {sorted(MODEL_PRESETS)}")
    return MiniMlmEncoder(vocab_size, **MODEL_PRESETS[preset])
