"""Whole-word span reconstruction and score attachment."""

import random

import pytest

from selmask import Document, SubwordToken, build_stats, metadis_score, tokenize, whole_words
from selmask.scoring import SCOPE_GLOBAL, SCOPE_PER_DOCUMENT, ScoreTable
from selmask.segmentation import ScoredSequence, WordSpan, make_scored_sequence, score_sequence
from selmask.tokenizer import CLS, SEP, wordpiece

from helpers import make_spec, wrapped_sequence


def _cls(spec):
    return SubwordToken(spec.cls_id, CLS, is_special=True)


def _sep(spec):
    return SubwordToken(spec.sep_id, SEP, is_special=True)


def test_single_multipiece_word():
    spec = make_spec(["juris", "##prud", "##ence"])
    tokens = (
        _cls(spec),
        SubwordToken(spec.vocab["juris"], "juris"),
        SubwordToken(spec.vocab["##prud"], "##prud", is_continuation=True),
        SubwordToken(spec.vocab["##ence"], "##ence", is_continuation=True),
        _sep(spec),
    )
    assert whole_words(tokens) == (WordSpan("jurisprudence", 1, 3),)


def test_all_special_sequence():
    spec = make_spec([])
    assert whole_words((_cls(spec), _sep(spec))) == ()


def test_mixed_sequence_hand_check():
    spec = make_spec(["the", "court", "##s", "rule"])
    tokens = (
        _cls(spec),
        SubwordToken(spec.vocab["the"], "the"),
        SubwordToken(spec.vocab["court"], "court"),
        SubwordToken(spec.vocab["##s"], "##s", is_continuation=True),
        SubwordToken(spec.vocab["rule"], "rule"),
        _sep(spec),
    )
    assert whole_words(tokens) == (
        WordSpan("the", 1, 1),
        WordSpan("courts", 2, 2),
        WordSpan("rule", 4, 1),
    )


def test_orphan_continuation_starts_own_span(caplog):
    spec = make_spec(["court", "##s"])
    tokens = (
        _cls(spec),
        SubwordToken(spec.vocab["##s"], "##s", is_continuation=True),
        SubwordToken(spec.vocab["court"], "court"),
        _sep(spec),
    )
    with caplog.at_level("WARNING"):
        spans = whole_words(tokens)
    assert spans == (WordSpan("s", 1, 1), WordSpan("court", 2, 1))
    assert any("no preceding word" in r.message for r in caplog.records)


@pytest.mark.parametrize("trial", range(20))
def test_coverage_of_non_special_tokens(trial):
    rng = random.Random(400 + trial)
    spec = make_spec(["court", "##s", "law", "rule"])
    tokens = [_cls(spec)]
    for _ in range(rng.randint(0, 40)):
        kind = rng.random()
        if kind < 0.5:
            surface = rng.choice(["court", "law", "rule"])
            tokens.append(SubwordToken(spec.vocab[surface], surface))
        elif kind < 0.8 and not tokens[-1].is_special:
            tokens.append(SubwordToken(spec.vocab["##s"], "##s", is_continuation=True))
        else:
            tokens.append(SubwordToken(spec.unk_id, "[UNK]", is_special=True))
    tokens.append(_sep(spec))
    spans = whole_words(tokens)
    non_special = sum(1 for t in tokens if not t.is_special)
    assert sum(s.length for s in spans) == non_special
    for a, b in zip(spans, spans[1:]):
        assert a.start + a.length <= b.start


def test_grouping_idempotent_under_retokenization():
    spec = make_spec(["the", "court", "##s", "juris", "##prud", "##ence", "held"])
    doc = tokenize(Document("d", "The courts jurisprudence held"), spec)
    for span in whole_words(doc.tokens):
        pieces = wordpiece(span.word, spec)
        original = doc.tokens[span.start : span.start + span.length]
        assert tuple(pieces) == tuple(original)


def test_score_sequence_lookup_and_fallback():
    table = ScoreTable(SCOPE_GLOBAL, "metadis", "fp", {"court": 0.5, "law": 0.25})
    words = (WordSpan("court", 1, 1), WordSpan("unknown", 2, 1), WordSpan("law", 3, 1))
    assert score_sequence(words, table, "d") == (0.5, 0.0, 0.25)


def test_per_document_wrong_doc_gives_zeros():
    table = ScoreTable(SCOPE_PER_DOCUMENT, "tfidf", "fp", {"a": {"court": 1.0}})
    words = (WordSpan("court", 1, 1),)
    assert score_sequence(words, table, "a") == (1.0,)
    assert score_sequence(words, table, "b") == (0.0,)


def test_scored_sequence_alignment_enforced():
    spec = make_spec(["court"])
    tokens = wrapped_sequence(["court"], spec)
    with pytest.raises(ValueError):
        ScoredSequence("d", tokens, whole_words(tokens), scores=(0.1, 0.2))


def test_make_scored_sequence():
    spec = make_spec(["court", "law"])
    stats = build_stats(
        [tokenize(Document("d", "court law court"), spec)], whole_words
    )
    table = metadis_score(stats)
    seq = make_scored_sequence("d", wrapped_sequence(["court", "law"], spec), table)
    assert [w.word for w in seq.words] == ["court", "law"]
    assert seq.scores == (table.entries["court"], table.entries["law"])
