"""Shared builders for toy corpora, vocabularies, and token streams."""

from __future__ import annotations

import json
import random
from pathlib import Path

from selmask import Document, SubwordToken, TokenizerSpec
from selmask.tokenizer import CLS, SEP, SPECIAL_TOKENS

LEGAL_WORDS = [
    "the", "court", "law", "judge", "case", "appeal", "rule", "held",
    "order", "motion", "party", "state", "federal", "district", "evidence",
    "statute", "claim", "judgment", "filed", "section", "argues", "counsel",
    "trial", "jury", "verdict", "plaintiff", "defendant", "supreme", "brief",
    "record", "opinion", "decision", "grant", "deny", "review", "hearing",
]


def make_spec(tokens, lowercase=True) -> TokenizerSpec:
    """Tokenizer spec whose vocabulary is the special tokens plus ``tokens``."""
    return TokenizerSpec.from_tokens([*SPECIAL_TOKENS, *tokens], lowercase)


def write_spec_file(tmp_path: Path, tokens, lowercase=True) -> Path:
    path = tmp_path / "tokenizer.json"
    path.write_text(
        json.dumps({"vocab": [*SPECIAL_TOKENS, *tokens], "lowercase": lowercase}),
        encoding="utf-8",
    )
    return path


def write_jsonl_corpus(tmp_path: Path, texts: dict[str, str], name="corpus.jsonl") -> Path:
    path = tmp_path / name
    with path.open("w", encoding="utf-8") as fh:
        for doc_id, text in texts.items():
            fh.write(json.dumps({"id": doc_id, "text": text}) + "\n")
    return path


def word_tokens(words, spec: TokenizerSpec | None = None) -> tuple[SubwordToken, ...]:
    """One single-piece token per word; ids come from ``spec`` when given."""
    if spec is None:
        ids: dict[str, int] = {}
        return tuple(
            SubwordToken(ids.setdefault(w, 10 + len(ids)), w) for w in words
        )
    return tuple(SubwordToken(spec.vocab[w], w) for w in words)


def word_doc(doc_id: str, words, spec: TokenizerSpec | None = None) -> Document:
    return Document(doc_id, " ".join(words), word_tokens(words, spec))


def wrapped_sequence(words, spec: TokenizerSpec) -> tuple[SubwordToken, ...]:
    """CLS + one token per word + SEP, as the chunker would emit."""
    cls = SubwordToken(spec.cls_id, CLS, is_special=True)
    sep = SubwordToken(spec.sep_id, SEP, is_special=True)
    return (cls, *word_tokens(words, spec), sep)


def random_word_corpus(rng: random.Random, max_docs=10, max_distinct=20, max_len=30):
    """Random list of (doc_id, word list) pairs over a small vocabulary."""
    vocabulary = [f"w{i}" for i in range(rng.randint(1, max_distinct))]
    n_docs = rng.randint(1, max_docs)
    corpus = []
    for d in range(n_docs):
        length = rng.randint(1, max_len)
        corpus.append((f"doc{d:03d}", [rng.choice(vocabulary) for _ in range(length)]))
    return corpus
