"""Toy continual-pretraining loop over masked-example record files.

Runs a tiny encoder for a bounded number of steps and reports the
masked-token cross-entropy per step.  Loss is computed only at masked
positions; a record without masks contributes zero loss terms.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch import nn

from .model import build_model
from .records import IGNORE_INDEX, load_records, make_batches, vocab_size_of


@dataclass
class TrainingRun:
    data: str
    model: str = "tiny"
    steps: int = 200
    batch_size: int = 8
    lr: float = 1e-3
    seed: int = 0
    checkpoint: str | None = None
    loss_trace: list[float] = field(default_factory=list)


def masked_loss(logits: torch.Tensor, labels: torch.Tensor) -> tuple[torch.Tensor, int]:
    """Summed cross-entropy over masked positions plus the target count."""
    loss_sum = nn.functional.cross_entropy(
        logits.flatten(0, 1), labels.flatten(), ignore_index=IGNORE_INDEX, reduction="sum"
    )
    return loss_sum, int((labels != IGNORE_INDEX).sum())


def ensure_finite(value: float, step: int) -> None:
    if not math.isfinite(value):
        raise RuntimeError(
            f"training diverged: loss {value!r} at step {step}; "
            "lower the learning rate or check the input records"
        )


def run_cpt_demo(run: TrainingRun) -> tuple[list[float], Path | None]:
    """Train for run.steps steps, returning the loss trace and checkpoint path."""
    if run.steps < 0:
        raise ValueError(f"steps must be >= 0, got {run.steps}")
    if run.steps == 0:
        return [], None

    torch.manual_seed(run.seed)
    records = load_records(run.data)
    if not records:
        raise ValueError(f"no records in {run.data}")
    batches = make_batches(records, run.batch_size)
    model = build_model(run.model, vocab_size_of(records))
    optimizer = torch.optim.Adam(model.parameters(), lr=run.lr)

    trace: list[float] = []
    model.train()
    for step in range(run.steps):
        batch = batches[step % len(batches)]
        optimizer.zero_grad()
        logits = model(batch["input_ids"], batch["attention_mask"])
        loss_sum, count = masked_loss(logits, batch["labels"])
        if count == 0:
            trace.append(0.0)
            continue
        loss = loss_sum / count
        ensure_finite(loss.item(), step)
        loss.backward()
        optimizer.step()
        trace.append(loss.item())
    run.loss_trace = trace

    checkpoint_path = None
    if run.checkpoint:
        checkpoint_path = Path(run.checkpoint)
        torch.save(
            {
                "model_state": model.state_dict(),
                "model": run.model,
                "vocab_size": vocab_size_of(records),
                "steps": run.steps,
                "seed": run.seed,
            },
            checkpoint_path,
        )
    return trace, checkpoint_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cpt-demo",
        description="Toy masked-LM continual-pretraining demo over record files.",
    )
    parser.add_argument("--data", required=True, help="record file (JSON lines)")
    parser.add_argument("--steps", type=int, default=200)
    parser.add_argument("--batch", type=int, default=8)
    parser.add_argument("--lr", type=float, default=1e-3)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--model", default="tiny")
    parser.add_argument("--out", help="checkpoint path (default: no checkpoint)")
    args = parser.parse_args(argv)

    run = TrainingRun(
        data=args.data,
        model=args.model,
        steps=args.steps,
        batch_size=args.batch,
        lr=args.lr,
        seed=args.seed,
        checkpoint=args.out,
    )
    try:
        trace, checkpoint = run_cpt_demo(run)
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}")
        return 1
    if not trace:
        print("0 steps requested; nothing trained")
        return 0
    head = sum(trace[:20]) / len(trace[:20])
    tail = sum(trace[-20:]) / len(trace[-20:])
    print(f"steps={len(trace)} first-20 mean loss={head:.4f} last-20 mean loss={tail:.4f}")
    if checkpoint:
        print(f"checkpoint saved to {checkpoint}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
