"""Corpus-driven selective masking for masked-language-model pretraining.

Scores words by genre specificity or topical salience, then deterministically
selects and corrupts whole words under the classical 15% token budget.
"""

from .corpus import (
    CorpusStats,
    Document,
    build_stats,
    corpus_fingerprint,
    load_corpus,
    load_stats,
    save_stats,
)
from .errors import ConfigError, DataError, InvariantError, SelmaskError
from .masking import (
    MaskPlan,
    MaskedExample,
    STRATEGIES,
    corrupt,
    derive_seed,
    sample_without_replacement,
    select_words,
)
from .pipeline import (
    MaskReport,
    PipelineConfig,
    chunk,
    load_records,
    load_report,
    mask_document,
    masked_word_counts,
    report_top_masked,
    run_pipeline,
    save_records,
    save_report,
    shuffle_dataset,
)
from .scoring import (
    ScoreTable,
    load_table,
    metadis_score,
    save_table,
    tfidf_score,
    to_distribution,
)
from .segmentation import ScoredSequence, WordSpan, make_scored_sequence, score_sequence, whole_words
from .tokenizer import SubwordToken, TokenizerSpec, tokenize

__version__ = "0.1.0"
