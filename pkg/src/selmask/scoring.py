"""Word-importance scorers and score-table persistence.

Two scorers share one CorpusStats source: the genre-specificity score
(global, in [0, 1], rewarding words spread evenly across documents) and
the per-document TF x IDF topicality score (smoothed idf, L2-normalized
document vectors).
"""

from __future__ import annotations

import json
import logging
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import CorpusStats
from .errors import DataError

logger = logging.getLogger(__name__)

SCOPE_GLOBAL = "global"
SCOPE_PER_DOCUMENT = "per-document"
PROVENANCES = ("metadis", "tfidf")


@dataclass(frozen=True)
class ScoreTable:
    """Immutable word -> score mapping, global or per-document.

    entries is {word: score} for global tables and {doc_id: {word: score}}
    for per-document tables.  fingerprint ties the table to the CorpusStats
    it was computed from.
    """

    scope: str
    provenance: str
    fingerprint: str
    entries: Mapping

    def lookup(self, word: str, doc_id: str | None = None) -> float:
        """Score for a word; unknown words (or doc ids) score 0."""
        if self.scope == SCOPE_GLOBAL:
            return self.entries.get(word, 0.0)
        return self.entries.get(doc_id, {}).get(word, 0.0)

    def validate(self) -> None:
        """Check the table invariants; raises DataError on violation."""
        if self.scope not in (SCOPE_GLOBAL, SCOPE_PER_DOCUMENT):
            raise DataError(f"unknown table scope: {self.scope!r}")
        if self.provenance not in PROVENANCES:
            raise DataError(f"unknown table provenance: {self.provenance!r}")
        if self.provenance == "metadis" and self.scope != SCOPE_GLOBAL:
            raise DataError("metadis tables must be global")
        if self.provenance == "tfidf" and self.scope != SCOPE_PER_DOCUMENT:
            raise DataError("tfidf tables must be per-document")
        for word, score in self._iter_scores():
            if not math.isfinite(score) or score < 0:
                raise DataError(f"invalid score {score!r} for word {word!r}")
            if self.provenance == "metadis" and score > 1:
                raise DataError(f"metadis score {score!r} for {word!r} exceeds 1")
        if self.scope == SCOPE_PER_DOCUMENT:
            for doc_id, vector in self.entries.items():
                if not vector:
                    continue
                norm = math.sqrt(sum(s * s for s in vector.values()))
                if abs(norm - 1.0) > 1e-9:
                    raise DataError(f"document {doc_id!r} vector norm {norm} != 1")

    def _iter_scores(self):
        if self.scope == SCOPE_GLOBAL:
            yield from self.entries.items()
        else:
            for vector in self.entries.values():
                yield from vector.items()


def metadis_score(stats: CorpusStats) -> ScoreTable:
    """Genre-specificity score per word.

    Combines three factors: docs-per-occurrence (df/tf), evenness of the
    per-document counts (1 - std/max, population std, 0 for a single
    document), and corpus coverage (df/N).  A word occurring exactly once
    in every document scores 1.0; all scores stay in [0, 1].
    """
    scores: dict[str, float] = {}
    n = stats.n_documents
    for word in stats.words():
        counts = list(stats.dtf(word).values())
        df = len(counts)
        tf = sum(counts)
        evenness = 1.0 - statistics.pstdev(counts) / max(counts)
        scores[word] = (df / tf) * evenness * (df / n)
    return ScoreTable(
        scope=SCOPE_GLOBAL,
        provenance="metadis",
        fingerprint=stats.fingerprint(),
        entries=scores,
    )


def tfidf_score(stats: CorpusStats) -> ScoreTable:
    """Per-document TF x IDF with smoothed idf and L2-normalized vectors.

    Raw weight is count * (ln((1+N)/(1+df)) + 1); each document's weight
    vector is then scaled to Euclidean norm 1.  Documents without any
    countable word get an empty vector.
    """
    n = stats.n_documents
    raw: dict[str, dict[str, float]] = {}
    for word in stats.words():
        dtf = stats.dtf(word)
        idf = math.log((1 + n) / (1 + len(dtf))) + 1.0
        for doc_id, count in dtf.items():
            raw.setdefault(doc_id, {})[word] = count * idf
    entries: dict[str, dict[str, float]] = {}
    for doc_id, vector in raw.items():
        norm = math.sqrt(sum(w * w for w in vector.values()))
        entries[doc_id] = {word: w / norm for word, w in vector.items()}
    return ScoreTable(
        scope=SCOPE_PER_DOCUMENT,
        provenance="tfidf",
        fingerprint=stats.fingerprint(),
        entries=entries,
    )


def to_distribution(scores: Sequence[float]) -> list[float]:
    """Normalize nonnegative scores into a probability vector.

    An all-zero input falls back to the uniform distribution so sampling
    can always proceed.
    """
    scores = list(scores)
    if not scores:
        raise ValueError("cannot build a distribution over zero entries")
    for s in scores:
        if not math.isfinite(s) or s < 0:
            raise ValueError(f"scores must be finite and nonnegative, got {s!r}")
    total = sum(scores)
    if total > 0:
        return [s / total for s in scores]
    return [1.0 / len(scores)] * len(scores)


def save_table(table: ScoreTable, path: str | Path) -> None:
    """Write a score table as JSON lines (17-significant-digit floats)."""
    table.validate()
    with Path(path).open("w", encoding="utf-8") as fh:
        header = {
            "scope": table.scope,
            "provenance": table.provenance,
            "fingerprint": table.fingerprint,
        }
        fh.write(json.dumps(header) + "\n")
        if table.scope == SCOPE_GLOBAL:
            for word in sorted(table.entries):
                line = {"word": word, "score": table.entries[word]}
                fh.write(json.dumps(line, ensure_ascii=False) + "\n")
        else:
            for doc_id in sorted(table.entries):
                for word in sorted(table.entries[doc_id]):
                    line = {"doc": doc_id, "word": word, "score": table.entries[doc_id][word]}
                    fh.write(json.dumps(line, ensure_ascii=False) + "\n")


def load_table(
    path: str | Path,
    stats: CorpusStats | None = None,
    expected_scope: str | None = None,
) -> ScoreTable:
    """Read a score table written by ``save_table``.

    A fingerprint mismatch against ``stats`` only warns; a scope mismatch
    against ``expected_scope`` is fatal.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"score table does not exist: {path}")
    with path.open("r", encoding="utf-8") as fh:
        try:
            header = json.loads(fh.readline())
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:1: invalid header: {exc}") from exc
        for key in ("scope", "provenance", "fingerprint"):
            if key not in header:
                raise DataError(f"{path}:1: header missing {key!r}")
        scope = header["scope"]
        entries: dict = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            word, score = record.get("word"), record.get("score")
            if not isinstance(word, str) or not isinstance(score, (int, float)):
                raise DataError(f"{path}:{lineno}: record needs 'word' and 'score'")
            if scope == SCOPE_GLOBAL:
                entries[word] = float(score)
            else:
                doc_id = record.get("doc")
                if not isinstance(doc_id, str):
                    raise DataError(f"{path}:{lineno}: per-document record needs 'doc'")
                entries.setdefault(doc_id, {})[word] = float(score)
    table = ScoreTable(
        scope=scope,
        provenance=header["provenance"],
        fingerprint=header["fingerprint"],
        entries=entries,
    )
    table.validate()
    if expected_scope is not None and table.scope != expected_scope:
        raise DataError(
            f"{path}: expected a {expected_scope} table, found {table.scope}"
        )
    if stats is not None and table.fingerprint != stats.fingerprint():
        logger.warning(
            "score table %s was computed from different corpus statistics "
            "(fingerprint %s != %s)",
            path,
            table.fingerprint,
            stats.fingerprint(),
        )
    return table
