"""Corpus loading and streaming word-count accumulation.

Documents come from JSON-lines files or directories of .txt files and are
always yielded in lexicographic doc_id order so every downstream stage is
deterministic.  ``build_stats`` folds per-document word counts into the
corpus-level statistics both scorers consume.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import DataError
from .tokenizer import SubwordToken


@dataclass(frozen=True)
class Document:
    """One corpus unit: identifier, raw text, and its subword token stream."""

    doc_id: str
    text: str
    tokens: tuple[SubwordToken, ...] = field(default=())


def load_corpus(path: str | Path, format: str) -> list[Document]:
    """Load documents from ``path``, sorted by doc_id.

    Args:
        path: JSON-lines file ("jsonl") or directory of .txt files ("txtdir").
        format: one of "jsonl", "txtdir".

    Raises:
        DataError: missing path, malformed record, or duplicate doc_id.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus path does not exist: {path}")
    if format == "jsonl":
        docs = _load_jsonl(path)
    elif format == "txtdir":
        docs = _load_txtdir(path)
    else:
        raise DataError(f"unknown corpus format: {format!r}")
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise DataError(f"duplicate doc_id: {doc.doc_id!r}")
        seen.add(doc.doc_id)
    docs.sort(key=lambda d: d.doc_id)
    return docs


def _load_jsonl(path: Path) -> list[Document]:
    docs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise DataError(f"{path}:{lineno}: record is not an object")
            for key in ("id", "text"):
                if key not in record:
                    raise DataError(f"{path}:{lineno}: record missing {key!r} field")
                if not isinstance(record[key], str):
                    raise DataError(f"{path}:{lineno}: field {key!r} is not a string")
            docs.append(Document(doc_id=record["id"], text=record["text"]))
    return docs


def _load_txtdir(path: Path) -> list[Document]:
    if not path.is_dir():
        raise DataError(f"not a directory: {path}")
    docs = []
    for file in sorted(path.glob("*.txt")):
        docs.append(Document(doc_id=file.name, text=file.read_text(encoding="utf-8")))
    return docs


class CorpusStats:
    """Corpus-level word counts: N documents plus per-word dtf maps.

    tf and df are derived from dtf (tf = sum of per-document counts,
    df = number of documents), so the consistency invariant holds by
    construction.
    """

    def __init__(self, n_documents: int, dtf: dict[str, dict[str, int]]):
        if n_documents < 1:
            raise DataError("corpus statistics need at least one document")
        self.n_documents = n_documents
        self._dtf = dtf

    def words(self) -> Iterable[str]:
        return self._dtf.keys()

    def __contains__(self, word: str) -> bool:
        return word in self._dtf

    def __len__(self) -> int:
        return len(self._dtf)

    def dtf(self, word: str) -> dict[str, int]:
        try:
            return self._dtf[word]
        except KeyError:
            raise KeyError(f"unknown word: {word!r}") from None

    def tf(self, word: str) -> int:
        return sum(self.dtf(word).values())

    def df(self, word: str) -> int:
        return len(self.dtf(word))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorpusStats):
            return NotImplemented
        return self.n_documents == other.n_documents and self._dtf == other._dtf

    def fingerprint(self) -> str:
        """Stable content hash used to tie score tables to their stats."""
        h = hashlib.sha256()
        h.update(f"N={self.n_documents}\n".encode())
        for word in sorted(self._dtf):
            counts = ",".join(f"{d}:{c}" for d, c in sorted(self._dtf[word].items()))
            h.update(f"{word}\t{counts}\n".encode())
        return h.hexdigest()[:16]


def count_document(doc: Document, segmenter: Callable) -> Counter:
    """Whole-word occurrence counts for one tokenized document."""
    return Counter(span.word for span in segmenter(doc.tokens))


def build_stats(docs: Sequence[Document], segmenter: Callable) -> CorpusStats:
    """Accumulate CorpusStats over tokenized documents.

    Per-document counts are merged associatively, so any grouping or
    ordering of partial merges yields the same result.

    Raises:
        DataError: zero documents (N=0 leaves every score undefined).
    """
    docs = list(docs)
    if not docs:
        raise DataError("cannot build statistics for an empty corpus")
    dtf: dict[str, dict[str, int]] = {}
    for doc in docs:
        for word, count in count_document(doc, segmenter).items():
            dtf.setdefault(word, {})[doc.doc_id] = count
    return CorpusStats(len(docs), dtf)


def save_stats(stats: CorpusStats, path: str | Path) -> None:
    """Write stats as JSON lines: an {"N": ...} header, then one word per line."""
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"N": stats.n_documents}) + "\n")
        for word in sorted(stats.words()):
            dtf = dict(sorted(stats.dtf(word).items()))
            record = {
                "word": word,
                "tf": stats.tf(word),
                "df": stats.df(word),
                "dtf": dtf,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_stats(path: str | Path) -> CorpusStats:
    """Read stats written by ``save_stats``, validating count consistency."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"stats file does not exist: {path}")
    with path.open("r", encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:1: invalid header: {exc}") from exc
        if not isinstance(header, dict) or "N" not in header:
            raise DataError(f"{path}:1: header must be an object with an 'N' field")
        n_documents = header["N"]
        dtf: dict[str, dict[str, int]] = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            word = record.get("word")
            counts = record.get("dtf")
            if not isinstance(word, str) or not isinstance(counts, dict):
                raise DataError(f"{path}:{lineno}: record needs 'word' and 'dtf'")
            if word in dtf:
                raise DataError(f"{path}:{lineno}: duplicate word {word!r}")
            if not counts or any(c < 1 for c in counts.values()):
                raise DataError(f"{path}:{lineno}: dtf counts must be >= 1")
            if record.get("df") != len(counts):
                raise DataError(f"{path}:{lineno}: df does not match dtf size")
            if record.get("tf") != sum(counts.values()):
                raise DataError(f"{path}:{lineno}: tf does not match dtf sum")
            if len(counts) > n_documents:
                raise DataError(f"{path}:{lineno}: df exceeds document count")
            dtf[word] = dict(counts)
    return CorpusStats(n_documents, dtf)


def corpus_fingerprint(docs: Sequence[Document]) -> str:
    """Content hash over doc ids and raw text, independent of tokenization."""
    h = hashlib.sha256()
    for doc in docs:
        h.update(doc.doc_id.encode())
        h.update(b"\x00")
        h.update(doc.text.encode())
        h.update(b"\x01")
    return h.hexdigest()[:16]
