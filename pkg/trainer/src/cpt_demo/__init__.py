"""Toy continual-pretraining demo over selective-masking record files."""

from .model import MODEL_PRESETS, MiniMlmEncoder, build_model
from .records import (
    IGNORE_INDEX,
    MaskedRecord,
    RecordError,
    load_records,
    make_batches,
    vocab_size_of,
)
from .train import TrainingRun, ensure_finite, masked_loss, run_cpt_demo

__version__ = "0.1.0"
