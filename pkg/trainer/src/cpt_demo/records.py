"""Load masked-example record files and collate them into training batches.

Record schema (one JSON object per line): doc, seq, ids, corrupted,
masked, labels.  Model inputs are the corrupted ids; loss targets exist
only at the masked positions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch

IGNORE_INDEX = -100

_FIELDS = ("doc", "seq", "ids", "corrupted", "masked", "labels")


class RecordError(ValueError):
    """A record file does not conform to the expected schema."""


@dataclass(frozen=True)
class MaskedRecord:
    doc_id: str
    seq_index: int
    original_ids: tuple[int, ...]
    corrupted_ids: tuple[int, ...]
    masked_positions: tuple[int, ...]
    labels: tuple[int, ...]


def load_records(path: str | Path) -> list[MaskedRecord]:
    """Parse a record file, validating the schema line by line."""
    path = Path(path)
    if not path.exists():
        raise RecordError(f"record file does not exist: {path}")
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            for field in _FIELDS:
                if field not in obj:
                    raise RecordError(f"{path}:{lineno}: missing field '{field}'")
            if len(obj["corrupted"]) != len(obj["ids"]):
                raise RecordError(
                    f"{path}:{lineno}: field 'corrupted' length differs from 'ids'"
                )
            if len(obj["labels"]) != len(obj["masked"]):
                raise RecordError(
                    f"{path}:{lineno}: field 'labels' length differs from 'masked'"
                )
            if any(not 0 <= p < len(obj["ids"]) for p in obj["masked"]):
                raise RecordError(f"{path}:{lineno}: field 'masked' position out of range")
            records.append(
                MaskedRecord(
                    doc_id=obj["doc"],
                    seq_index=obj["seq"],
                    original_ids=tuple(obj["ids"]),
                    corrupted_ids=tuple(obj["corrupted"]),
                    masked_positions=tuple(obj["masked"]),
                    labels=tuple(obj["labels"]),
                )
            )
    return records


def vocab_size_of(records: list[MaskedRecord]) -> int:
    top = 0
    for r in records:
        top = max(top, max(r.original_ids, default=0), max(r.corrupted_ids, default=0))
    return top + 1


def make_batches(
    records: list[MaskedRecord], batch_size: int, pad_id: int = 0
) -> list[dict[str, torch.Tensor]]:
    """Collate records in file order into fixed-size padded batches.

    Each batch holds input_ids (corrupted), attention_mask, and labels
    filled with IGNORE_INDEX everywhere except the masked positions.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    batches = []
    for start in range(0, len(records), batch_size):
        group = records[start : start + batch_size]
        width = max(len(r.corrupted_ids) for r in group)
        input_ids = torch.full((len(group), width), pad_id, dtype=torch.long)
        attention = torch.zeros((len(group), width), dtype=torch.bool)
        labels = torch.full((len(group), width), IGNORE_INDEX, dtype=torch.long)
        for row, record in enumerate(group):
            n = len(record.corrupted_ids)
            input_ids[row, :n] = torch.tensor(record.corrupted_ids, dtype=torch.long)
            attention[row, :n] = True
            for position, label in zip(record.masked_positions, record.labels):
                labels[row, position] = label
        batches.append(
            {"input_ids": input_ids, "attention_mask": attention, "labels": labels}
        )
    return batches
