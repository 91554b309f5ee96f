"""End-to-end orchestration: chunk, score, mask, shuffle, emit, report.

Each sequence owns an RNG seeded from (global seed, doc id, sequence
index), so per-document work can run in any order or in parallel and the
emitted files stay byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document, build_stats, corpus_fingerprint, load_corpus
from .errors import ConfigError, DataError, SelmaskError
from .masking import MaskedExample, corrupt, derive_seed, select_words
from .scoring import ScoreTable, metadis_score, save_table, tfidf_score
from .segmentation import make_scored_sequence, whole_words
from .tokenizer import CLS, SEP, SubwordToken, TokenizerSpec, tokenize

SCORERS = ("metadis", "tfidf")
SELECTORS = ("rand", "topn", "classical")


@dataclass(frozen=True)
class PipelineConfig:
    """All reproduction knobs for one pipeline run."""

    corpus: str
    format: str
    tokenizer: str
    scorer: str
    strategy: str
    out: str
    seed: int
    max_seq_len: int = 512
    shuffle_rounds: int = 3
    report_k: int = 50
    workers: int = 1

    def validate(self) -> None:
        if self.format not in ("jsonl", "txtdir"):
            raise ConfigError(f"unknown corpus format {self.format!r}")
        if self.scorer not in SCORERS:
            raise ConfigError(f"unknown scorer {self.scorer!r}")
        if self.strategy not in SELECTORS:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.max_seq_len < 8:
            raise ConfigError(f"max_seq_len must be >= 8, got {self.max_seq_len}")
        if self.shuffle_rounds < 0:
            raise ConfigError(f"shuffle_rounds must be >= 0, got {self.shuffle_rounds}")
        if self.report_k < 0:
            raise ConfigError(f"report_k must be >= 0, got {self.report_k}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    @property
    def strategy_label(self) -> str:
        if self.strategy == "classical":
            return "classical-random"
        return f"{self.scorer}-{self.strategy}"

    def hash(self) -> str:
        canonical = json.dumps(
            {k: getattr(self, k) for k in sorted(self.__dataclass_fields__)},
            sort_keys=True,
        )
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MaskReport:
    """Ranked (word, times-masked) list with its provenance."""

    entries: tuple[tuple[str, int], ...]
    scorer: str
    strategy: str
    corpus_fingerprint: str


def chunk(
    tokens: Sequence[SubwordToken], max_seq_len: int, spec: TokenizerSpec
) -> list[tuple[SubwordToken, ...]]:
    """Split a document token stream into CLS/SEP-wrapped windows.

    Windows hold up to max_seq_len - 2 content tokens, never split a
    whole word (the word moves to the next window), and a single word
    longer than a window is truncated to fit one.
    """
    if max_seq_len < 8:
        raise ConfigError(f"max_seq_len must be >= 8, got {max_seq_len}")
    capacity = max_seq_len - 2
    cls = SubwordToken(spec.cls_id, CLS, is_special=True)
    sep = SubwordToken(spec.sep_id, SEP, is_special=True)

    windows: list[list[SubwordToken]] = []
    current: list[SubwordToken] = []
    for unit in _atomic_units(tokens):
        if len(current) + len(unit) <= capacity:
            current.extend(unit)
            continue
        if current:
            windows.append(current)
            current = []
        if len(unit) <= capacity:
            current = list(unit)
        else:
            windows.append(list(unit[:capacity]))
    if current:
        windows.append(current)
    return [tuple([cls, *window, sep]) for window in windows]


def _atomic_units(tokens: Sequence[SubwordToken]) -> list[list[SubwordToken]]:
    """Group continuation runs so chunking never cuts inside a word."""
    units: list[list[SubwordToken]] = []
    for token in tokens:
        attachable = (
            token.is_continuation
            and not token.is_special
            and units
            and not units[-1][-1].is_special
        )
        if attachable:
            units[-1].append(token)
        else:
            units.append([token])
    return units


def shuffle_dataset(examples: Sequence, seed: int, rounds: int) -> list:
    """Apply the seeded Fisher-Yates permutation ``rounds`` times.

    The generator is re-seeded with the same seed before every round, so
    each round applies the identical permutation.
    """
    if rounds < 0:
        raise ConfigError(f"shuffle rounds must be >= 0, got {rounds}")
    shuffled = list(examples)
    for _ in range(rounds):
        random.Random(seed).shuffle(shuffled)
    return shuffled


def mask_document(
    doc: Document,
    table: ScoreTable,
    strategy_label: str,
    spec: TokenizerSpec,
    max_seq_len: int,
    global_seed: int,
) -> list[MaskedExample]:
    """Chunk one tokenized document and mask every window."""
    examples = []
    for seq_index, window in enumerate(chunk(doc.tokens, max_seq_len, spec)):
        seq = make_scored_sequence(doc.doc_id, window, table)
        seed = derive_seed(global_seed, doc.doc_id, seq_index)
        rng = random.Random(seed)
        plan = select_words(seq, strategy_label, seed, rng=rng)
        examples.append(
            corrupt(
                window,
                plan,
                rng,
                spec.vocab_size,
                spec.mask_id,
                spec.special_ids,
                doc_id=doc.doc_id,
                seq_index=seq_index,
            )
        )
    return examples


def masked_word_counts(
    examples: Iterable[MaskedExample], spec: TokenizerSpec
) -> Counter:
    """Times-masked count per word.

    A word instance counts once when at least one of its tokens is masked,
    which makes the count derivable from a record file alone.
    """
    counts: Counter = Counter()
    for example in examples:
        masked = set(example.masked_positions)
        if not masked:
            continue
        tokens = [spec.token(i) for i in example.original_ids]
        for span in whole_words(tokens):
            if any(p in masked for p in range(span.start, span.start + span.length)):
                counts[span.word] += 1
    return counts


def report_top_masked(
    examples: Iterable[MaskedExample],
    spec: TokenizerSpec,
    k: int = 50,
    scorer: str = "unknown",
    strategy: str = "unknown",
    corpus_fp: str = "",
) -> MaskReport:
    """Top-k most masked words, descending count, ties lexicographic."""
    counts = masked_word_counts(examples, spec)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return MaskReport(
        entries=tuple(ranked[:k]),
        scorer=scorer,
        strategy=strategy,
        corpus_fingerprint=corpus_fp,
    )


def save_report(report: MaskReport, path: str | Path) -> None:
    payload = {
        "scorer": report.scorer,
        "strategy": report.strategy,
        "corpus_fingerprint": report.corpus_fingerprint,
        "entries": [{"word": w, "count": c} for w, c in report.entries],
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def load_report(path: str | Path) -> MaskReport:
    path = Path(path)
    if not path.exists():
        raise DataError(f"report file does not exist: {path}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    return MaskReport(
        entries=tuple((e["word"], e["count"]) for e in payload["entries"]),
        scorer=payload["scorer"],
        strategy=payload["strategy"],
        corpus_fingerprint=payload["corpus_fingerprint"],
    )


def save_records(examples: Iterable[MaskedExample], path: str | Path) -> None:
    """One JSON object per line, field order fixed for byte-stable output."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for ex in examples:
            record = {
                "doc": ex.doc_id,
                "seq": ex.seq_index,
                "ids": list(ex.original_ids),
                "corrupted": list(ex.corrupted_ids),
                "masked": list(ex.masked_positions),
                "labels": list(ex.labels),
            }
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")


def load_records(path: str | Path) -> list[MaskedExample]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"record file does not exist: {path}")
    examples = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                example = MaskedExample(
                    doc_id=record["doc"],
                    seq_index=record["seq"],
                    original_ids=tuple(record["ids"]),
                    corrupted_ids=tuple(record["corrupted"]),
                    masked_positions=tuple(record["masked"]),
                    labels=tuple(record["labels"]),
                )
            except KeyError as exc:
                raise DataError(f"{path}:{lineno}: record missing field {exc}") from exc
            if len(example.corrupted_ids) != len(example.original_ids):
                raise DataError(f"{path}:{lineno}: ids/corrupted length mismatch")
            if len(example.labels) != len(example.masked_positions):
                raise DataError(f"{path}:{lineno}: masked/labels length mismatch")
            examples.append(example)
    return examples


@dataclass
class RunResult:
    manifest: dict
    scores_path: Path
    records_path: Path
    report_path: Path
    manifest_path: Path
    report: MaskReport = field(repr=False, default=None)


def run_pipeline(config: PipelineConfig) -> RunResult:
    """Run the full pipeline and write scores, records, report, manifest.

    Any stage failure removes the partially written outputs and re-raises
    with the stage name prepended.
    """
    config.validate()
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "scores": out_dir / "scores.jsonl",
        "records": out_dir / "records.jsonl",
        "report": out_dir / "report.json",
        "manifest": out_dir / "manifest.json",
    }
    written: list[Path] = []
    stage = "setup"
    try:
        stage = "load"
        spec = TokenizerSpec.from_file(config.tokenizer)
        docs = load_corpus(config.corpus, config.format)
        if not docs:
            raise DataError("corpus contains no documents")

        stage = "tokenize"
        docs = [tokenize(doc, spec) for doc in docs]

        stage = "stats"
        stats = build_stats(docs, whole_words)

        stage = "score"
        scorer = metadis_score if config.scorer == "metadis" else tfidf_score
        table = scorer(stats)
        written.append(paths["scores"])
        save_table(table, paths["scores"])

        stage = "mask"
        worker = partial(
            mask_document,
            table=table,
            strategy_label=config.strategy_label,
            spec=spec,
            max_seq_len=config.max_seq_len,
            global_seed=config.seed,
        )
        if config.workers > 1:
            with multiprocessing.Pool(config.workers) as pool:
                per_doc = pool.map(worker, docs)
        else:
            per_doc = [worker(doc) for doc in docs]
        examples = [ex for doc_examples in per_doc for ex in doc_examples]
        examples.sort(key=lambda ex: (ex.doc_id, ex.seq_index))

        stage = "shuffle"
        shuffled = shuffle_dataset(examples, config.seed, config.shuffle_rounds)

        stage = "emit"
        written.append(paths["records"])
        save_records(shuffled, paths["records"])
        corpus_fp = corpus_fingerprint(docs)
        report = report_top_masked(
            shuffled,
            spec,
            k=config.report_k,
            scorer=config.scorer,
            strategy=config.strategy,
            corpus_fp=corpus_fp,
        )
        written.append(paths["report"])
        save_report(report, paths["report"])

        stage = "manifest"
        manifest = {
            "config": {k: getattr(config, k) for k in sorted(config.__dataclass_fields__)},
            "config_hash": config.hash(),
            "corpus_fingerprint": corpus_fp,
            "stats_fingerprint": stats.fingerprint(),
            "counts": {
                "documents": len(docs),
                "sequences": len(examples),
                "masked_tokens": sum(len(ex.masked_positions) for ex in examples),
            },
        }
        written.append(paths["manifest"])
        paths["manifest"].write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    except SelmaskError as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise type(exc)(f"{stage}: {exc}") from exc
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return RunResult(
        manifest=manifest,
        scores_path=paths["scores"],
        records_path=paths["records"],
        report_path=paths["report"],
        manifest_path=paths["manifest"],
        report=report,
    )
