"""BERT-compatible subword tokenization driven by a plain vocabulary file.

A tokenizer spec is a JSON file with a ``lowercase`` flag and either an
inline ``vocab`` list or a ``vocab_file`` path (one token per line, the
line number is the token id).  Words are split greedily into vocabulary
pieces; non-initial pieces carry the ``##`` continuation prefix.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import ConfigError

if TYPE_CHECKING:
    from .corpus import Document

CONTINUATION_PREFIX = "##"
PAD, UNK, CLS, SEP, MASK = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"
SPECIAL_TOKENS = (PAD, UNK, CLS, SEP, MASK)

# Longest word (in characters) still handed to the subword splitter;
# anything longer maps to [UNK] wholesale.
MAX_WORD_CHARS = 100


@dataclass(frozen=True)
class SubwordToken:
    """One vocabulary entry occurrence inside a token stream."""

    id: int
    surface: str
    is_special: bool = False
    is_continuation: bool = False


class TokenizerSpec:
    """Vocabulary plus normalization config for subword tokenization.

    Attributes:
        vocab: token surface -> integer id.
        lowercase: whether input text is lowercased before splitting.
    """

    def __init__(self, vocab: dict[str, int], lowercase: bool):
        missing = [t for t in SPECIAL_TOKENS if t not in vocab]
        if missing:
            raise ConfigError(f"tokenizer vocabulary missing special tokens: {missing}")
        self.vocab = dict(vocab)
        self.lowercase = bool(lowercase)
        self.unk_id = vocab[UNK]
        self.cls_id = vocab[CLS]
        self.sep_id = vocab[SEP]
        self.mask_id = vocab[MASK]
        self.pad_id = vocab[PAD]
        self.special_ids = frozenset(vocab[t] for t in SPECIAL_TOKENS)
        self._surfaces = {i: t for t, i in vocab.items()}
        if len(self._surfaces) != len(vocab):
            raise ConfigError("tokenizer vocabulary has duplicate ids")

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def surface(self, token_id: int) -> str:
        return self._surfaces[token_id]

    def token(self, token_id: int) -> SubwordToken:
        """Rebuild a SubwordToken from its id (used when reading record files)."""
        surface = self._surfaces.get(token_id)
        if surface is None:
            raise ConfigError(f"token id {token_id} outside vocabulary")
        return SubwordToken(
            id=token_id,
            surface=surface,
            is_special=token_id in self.special_ids,
            is_continuation=surface.startswith(CONTINUATION_PREFIX),
        )

    @classmethod
    def from_tokens(cls, tokens: list[str], lowercase: bool) -> "TokenizerSpec":
        return cls({t: i for i, t in enumerate(tokens)}, lowercase)

    @classmethod
    def from_file(cls, path: str | Path) -> "TokenizerSpec":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"tokenizer spec not found: {path}")
        try:
            spec = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"tokenizer spec {path} is not valid JSON: {exc}") from exc
        if "lowercase" not in spec:
            raise ConfigError(f"tokenizer spec {path} missing 'lowercase' flag")
        if ("vocab" in spec) == ("vocab_file" in spec):
            raise ConfigError(
                f"tokenizer spec {path} needs exactly one of 'vocab' or 'vocab_file'"
            )
        if "vocab" in spec:
            tokens = list(spec["vocab"])
        else:
            vocab_path = (path.parent / spec["vocab_file"]).resolve()
            if not vocab_path.exists():
                raise ConfigError(f"vocabulary file not found: {vocab_path}")
            tokens = vocab_path.read_text(encoding="utf-8").splitlines()
        return cls.from_tokens(tokens, spec["lowercase"])


def _is_punctuation(char: str) -> bool:
    # ASCII symbol ranges count as punctuation, matching the BERT convention.
    cp = ord(char)
    if 33 <= cp <= 47 or 58 <= cp <= 64 or 91 <= cp <= 96 or 123 <= cp <= 126:
        return True
    return unicodedata.category(char).startswith("P")


def split_words(text: str, lowercase: bool) -> list[str]:
    """Split text into whole words: whitespace-delimited, punctuation isolated."""
    if lowercase:
        text = text.lower()
    words: list[str] = []
    for chunk in text.split():
        start = 0
        for i, ch in enumerate(chunk):
            if _is_punctuation(ch):
                if i > start:
                    words.append(chunk[start:i])
                words.append(ch)
                start = i + 1
        if start < len(chunk):
            words.append(chunk[start:])
    return words


def wordpiece(word: str, spec: TokenizerSpec) -> list[SubwordToken]:
    """Greedy longest-match subword split of one word.

    A word with any unmatchable remainder becomes a single [UNK] token.
    """
    if len(word) > MAX_WORD_CHARS:
        return [SubwordToken(spec.unk_id, UNK, is_special=True)]
    pieces: list[SubwordToken] = []
    pos = 0
    while pos < len(word):
        end = len(word)
        piece = None
        while end > pos:
            candidate = word[pos:end]
            if pos > 0:
                candidate = CONTINUATION_PREFIX + candidate
            if candidate in spec.vocab:
                piece = candidate
                break
            end -= 1
        if piece is None:
            return [SubwordToken(spec.unk_id, UNK, is_special=True)]
        pieces.append(
            SubwordToken(spec.vocab[piece], piece, is_continuation=pos > 0)
        )
        pos = end
    return pieces


def tokenize(doc: "Document", spec: TokenizerSpec) -> "Document":
    """Return a copy of ``doc`` with its subword token stream filled in."""
    tokens: list[SubwordToken] = []
    for word in split_words(doc.text, spec.lowercase):
        tokens.extend(wordpiece(word, spec))
    return replace(doc, tokens=tuple(tokens))
