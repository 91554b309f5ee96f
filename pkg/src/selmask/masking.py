"""Whole-word selection under the 15% token budget, plus corruption.

The selection loop repeatedly draws a word (weighted sample or argmax,
depending on strategy), drops it from the candidate pool, and keeps it
only if it still fits the budget.  Budget comparisons use exact integer
arithmetic: "x <= 0.15 * n" is evaluated as 20*x <= 3*n.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, InvariantError
from .scoring import to_distribution
from .segmentation import ScoredSequence, WordSpan
from .tokenizer import SubwordToken

STRATEGIES = (
    "metadis-rand",
    "metadis-topn",
    "tfidf-rand",
    "tfidf-topn",
    "classical-random",
)

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class MaskPlan:
    """The words chosen for masking in one sequence."""

    selected: tuple[WordSpan, ...]
    budget_tokens: int
    strategy: str
    seed: int


@dataclass(frozen=True)
class MaskedExample:
    """One training record: original ids, corrupted ids, and mask targets."""

    doc_id: str
    seq_index: int
    original_ids: tuple[int, ...]
    corrupted_ids: tuple[int, ...]
    masked_positions: tuple[int, ...]
    labels: tuple[int, ...]


def derive_seed(global_seed: int, doc_id: str, seq_index: int) -> int:
    """Per-sequence 64-bit seed: FNV-1a over "global_seed|doc_id|seq_index".

    Pure byte arithmetic, so identical inputs give identical seeds on any
    platform.
    """
    data = f"{global_seed}|{doc_id}|{seq_index}".encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


def sample_without_replacement(weights: Sequence[float], rng: random.Random) -> int:
    """Draw one index from a probability vector.

    The caller removes the drawn index and renormalizes before the next
    call, which makes repeated draws sampling without replacement.
    """
    if len(weights) == 0:
        raise ValueError("cannot sample from an empty distribution")
    r = rng.random()
    cumulative = 0.0
    last_positive = None
    for i, w in enumerate(weights):
        cumulative += w
        if w > 0:
            last_positive = i
        if r < cumulative:
            return i
    # r landed beyond the (floating point) total; return the last viable index.
    if last_positive is None:
        raise ValueError("distribution has no positive weight")
    return last_positive


def select_words(
    seq: ScoredSequence,
    strategy: str,
    rng_seed: int,
    rng: random.Random | None = None,
) -> MaskPlan:
    """Choose the words to mask in ``seq`` under the 15% token budget.

    Strategies: *-topn takes the highest-scored remaining word each round
    (ties break on lowest start index); *-rand samples the remaining words
    with probability proportional to their scores; classical-random
    ignores words entirely and picks uniform token positions.

    A drawn word that no longer fits the budget is discarded, so the loop
    always terminates: either the budget is reached or the pool drains.
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    if rng is None:
        rng = random.Random(rng_seed)
    n = sum(1 for t in seq.tokens if not t.is_special)
    budget = 3 * n // 20

    if strategy == "classical-random":
        selected = _classical_token_spans(seq, budget, rng)
    else:
        pool = list(range(len(seq.words)))
        picked: list[int] = []
        masked = 0
        while 20 * masked < 3 * n and pool:
            if strategy.endswith("-topn"):
                j = max(
                    range(len(pool)),
                    key=lambda k: (seq.scores[pool[k]], -seq.words[pool[k]].start),
                )
            else:
                dist = to_distribution([seq.scores[i] for i in pool])
                j = sample_without_replacement(dist, rng)
            i = pool.pop(j)
            length = seq.words[i].length
            if 20 * (masked + length) <= 3 * n:
                picked.append(i)
                masked += length
        selected = tuple(seq.words[i] for i in sorted(picked))

    return MaskPlan(selected=selected, budget_tokens=budget, strategy=strategy, seed=rng_seed)


def _classical_token_spans(
    seq: ScoredSequence, budget: int, rng: random.Random
) -> tuple[WordSpan, ...]:
    """Uniform token-level selection, the classical 15% baseline.

    Each chosen token becomes a single-token span labeled with its
    containing whole word so reports stay word-attributable.
    """
    positions = [i for i, t in enumerate(seq.tokens) if not t.is_special]
    if budget <= 0 or not positions:
        return ()
    chosen = sorted(rng.sample(positions, min(budget, len(positions))))
    word_at = {}
    for span in seq.words:
        for offset in range(span.length):
            word_at[span.start + offset] = span.word
    return tuple(
        WordSpan(word=word_at.get(p, seq.tokens[p].surface), start=p, length=1)
        for p in chosen
    )


def corrupt(
    tokens: Sequence[SubwordToken],
    plan: MaskPlan,
    rng: random.Random,
    vocab_size: int,
    mask_token_id: int,
    special_ids: frozenset[int] = frozenset(),
    doc_id: str = "",
    seq_index: int = 0,
) -> MaskedExample:
    """Apply 80/10/10 corruption to every token inside the plan's spans.

    Independently per masked token: 80% substitute the mask id, 10%
    substitute a uniform random non-special vocabulary id, 10% keep the
    original.  Labels record the original id at every masked position,
    kept ones included.
    """
    if not 0 <= mask_token_id < vocab_size:
        raise ConfigError(f"mask token id {mask_token_id} outside vocabulary of {vocab_size}")
    if vocab_size <= len(special_ids):
        raise ConfigError("vocabulary has no non-special ids to draw replacements from")
    original = tuple(t.id for t in tokens)
    corrupted = list(original)
    positions = sorted(
        p for span in plan.selected for p in range(span.start, span.start + span.length)
    )
    if len(set(positions)) != len(positions):
        raise InvariantError("mask plan spans overlap")
    labels = []
    for p in positions:
        if tokens[p].is_special:
            raise InvariantError(f"mask plan covers special token at position {p}")
        labels.append(original[p])
        roll = rng.random()
        if roll < 0.8:
            corrupted[p] = mask_token_id
        elif roll < 0.9:
            corrupted[p] = _random_regular_id(rng, vocab_size, special_ids)
        # remaining 10%: keep the original id
    return MaskedExample(
        doc_id=doc_id,
        seq_index=seq_index,
        original_ids=original,
        corrupted_ids=tuple(corrupted),
        masked_positions=tuple(positions),
        labels=tuple(labels),
    )


def _random_regular_id(rng: random.Random, vocab_size: int, special_ids) -> int:
    while True:
        candidate = rng.randrange(vocab_size)
        if candidate not in special_ids:
            return candidate
