"""Whole-word reconstruction over subword token streams.

Groups each maximal [non-continuation, continuation*] run of non-special
tokens into a WordSpan and attaches per-word scores, producing the scored
sequences the selection loop consumes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .scoring import ScoreTable
from .tokenizer import CONTINUATION_PREFIX, SubwordToken

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WordSpan:
    """A whole word as a contiguous run of token indices."""

    word: str
    start: int
    length: int


@dataclass(frozen=True)
class ScoredSequence:
    """One training sequence with its word spans and aligned scores."""

    doc_id: str
    tokens: tuple[SubwordToken, ...]
    words: tuple[WordSpan, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.scores) != len(self.words):
            raise ValueError("scores must align one-to-one with words")


def whole_words(tokens: Sequence[SubwordToken]) -> tuple[WordSpan, ...]:
    """Group non-special tokens into whole-word spans.

    A continuation token at sequence start or right after a special token
    has no head to attach to; it opens its own span (corrupted input,
    tolerated and logged).
    """
    spans: list[WordSpan] = []
    start = None
    pieces: list[str] = []

    def flush(end: int):
        nonlocal start, pieces
        if start is not None:
            word = pieces[0] + "".join(
                p[len(CONTINUATION_PREFIX):] if p.startswith(CONTINUATION_PREFIX) else p
                for p in pieces[1:]
            )
            spans.append(WordSpan(word=word, start=start, length=end - start))
        start = None
        pieces = []

    for i, token in enumerate(tokens):
        if token.is_special:
            flush(i)
            continue
        if token.is_continuation and start is not None:
            pieces.append(token.surface)
            continue
        if token.is_continuation:
            logger.warning(
                "continuation token %r at index %d has no preceding word", token.surface, i
            )
        flush(i)
        start = i
        surface = token.surface
        if surface.startswith(CONTINUATION_PREFIX):
            surface = surface[len(CONTINUATION_PREFIX):]
        pieces = [surface]
    flush(len(tokens))
    return tuple(spans)


def score_sequence(
    words: Sequence[WordSpan], table: ScoreTable, doc_id: str
) -> tuple[float, ...]:
    """Look up each word's score; words absent from the table score 0."""
    return tuple(table.lookup(span.word, doc_id) for span in words)


def make_scored_sequence(
    doc_id: str, tokens: Sequence[SubwordToken], table: ScoreTable
) -> ScoredSequence:
    """Convenience constructor: group words and attach scores in one step."""
    tokens = tuple(tokens)
    words = whole_words(tokens)
    return ScoredSequence(
        doc_id=doc_id,
        tokens=tokens,
        words=words,
        scores=score_sequence(words, table, doc_id),
    )
