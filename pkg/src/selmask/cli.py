"""Command-line interface: stats, score, mask, report, run.

Exit codes: 0 success, 2 config error, 3 data error, 4 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import sys

from .corpus import build_stats, load_corpus, load_stats, save_stats
from .errors import ConfigError, SelmaskError
from .pipeline import (
    PipelineConfig,
    load_records,
    mask_document,
    report_top_masked,
    run_pipeline,
    save_records,
    save_report,
    shuffle_dataset,
)
from .scoring import ScoreTable, load_table, metadis_score, save_table, tfidf_score
from .segmentation import whole_words
from .tokenizer import TokenizerSpec, tokenize


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selmask",
        description="Selective whole-word masking pipeline for MLM pretraining data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    stats = sub.add_parser("stats", help="tokenize a corpus and write word statistics")
    _corpus_args(stats)
    stats.add_argument("--out", required=True, help="output stats file (JSON lines)")

    score = sub.add_parser("score", help="compute a score table from saved statistics")
    score.add_argument("--stats", required=True, help="stats file written by 'stats'")
    score.add_argument("--scorer", required=True, choices=["metadis", "tfidf"])
    score.add_argument("--out", required=True, help="output score table file")

    mask = sub.add_parser("mask", help="emit masked training records")
    _corpus_args(mask)
    mask.add_argument("--table", help="score table (required unless --strategy classical)")
    mask.add_argument("--strategy", required=True, choices=["rand", "topn", "classical"])
    mask.add_argument("--max-seq-len", type=int, default=512)
    mask.add_argument("--seed", type=int, required=True)
    mask.add_argument("--shuffle-rounds", type=int, default=0)
    mask.add_argument("--out", required=True, help="output record file (JSON lines)")

    report = sub.add_parser("report", help="rank the most masked words in a record file")
    report.add_argument("--records", required=True)
    report.add_argument("--tokenizer", required=True)
    report.add_argument("--report-k", type=int, default=50)
    report.add_argument("--out", help="also write the report as JSON")

    run = sub.add_parser("run", help="full pipeline: stats, score, mask, report")
    _corpus_args(run)
    run.add_argument("--scorer", required=True, choices=["metadis", "tfidf"])
    run.add_argument("--strategy", required=True, choices=["rand", "topn", "classical"])
    run.add_argument("--max-seq-len", type=int, default=512)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--shuffle-rounds", type=int, default=3)
    run.add_argument("--report-k", type=int, default=50)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", required=True, help="output directory")
    return parser


def _corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True)
    parser.add_argument("--format", required=True, choices=["jsonl", "txtdir"])
    parser.add_argument("--tokenizer", required=True, help="tokenizer spec (JSON)")


def _load_tokenized(args) -> tuple:
    spec = TokenizerSpec.from_file(args.tokenizer)
    docs = [tokenize(d, spec) for d in load_corpus(args.corpus, args.format)]
    return spec, docs


def _cmd_stats(args) -> int:
    _, docs = _load_tokenized(args)
    stats = build_stats(docs, whole_words)
    save_stats(stats, args.out)
    print(f"wrote statistics for {len(stats)} words over {stats.n_documents} documents")
    return 0


def _cmd_score(args) -> int:
    stats = load_stats(args.stats)
    table = metadis_score(stats) if args.scorer == "metadis" else tfidf_score(stats)
    save_table(table, args.out)
    print(f"wrote {args.scorer} score table to {args.out}")
    return 0


def _cmd_mask(args) -> int:
    spec, docs = _load_tokenized(args)
    if args.strategy == "classical":
        table = ScoreTable(scope="global", provenance="metadis", fingerprint="", entries={})
        label = "classical-random"
    else:
        if not args.table:
            raise ConfigError("--table is required for scored strategies")
        table = load_table(args.table)
        label = f"{table.provenance}-{args.strategy}"
    examples = []
    for doc in docs:
        examples.extend(
            mask_document(doc, table, label, spec, args.max_seq_len, args.seed)
        )
    examples.sort(key=lambda ex: (ex.doc_id, ex.seq_index))
    examples = shuffle_dataset(examples, args.seed, args.shuffle_rounds)
    save_records(examples, args.out)
    print(f"wrote {len(examples)} masked sequences to {args.out}")
    return 0


def _cmd_report(args) -> int:
    spec = TokenizerSpec.from_file(args.tokenizer)
    examples = load_records(args.records)
    report = report_top_masked(examples, spec, k=args.report_k)
    print(", ".join(word for word, _ in report.entries))
    if args.out:
        save_report(report, args.out)
    return 0


def _cmd_run(args) -> int:
    config = PipelineConfig(
        corpus=args.corpus,
        format=args.format,
        tokenizer=args.tokenizer,
        scorer=args.scorer,
        strategy=args.strategy,
        out=args.out,
        seed=args.seed,
        max_seq_len=args.max_seq_len,
        shuffle_rounds=args.shuffle_rounds,
        report_k=args.report_k,
        workers=args.workers,
    )
    result = run_pipeline(config)
    counts = result.manifest["counts"]
    print(
        f"masked {counts['masked_tokens']} tokens over {counts['sequences']} "
        f"sequences from {counts['documents']} documents -> {args.out}"
    )
    return 0


_COMMANDS = {
    "stats": _cmd_stats,
    "score": _cmd_score,
    "mask": _cmd_mask,
    "report": _cmd_report,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SelmaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
