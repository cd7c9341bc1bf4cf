"""Seq2seq trainer for translating masked questions into logic query text.

Couples to the evaluation harness only through TSV files: it consumes the
annotated-pair and metadata formats and emits the predictions format.
"""

from .config import TrainConfig
from .data import (
    TsvFormatError,
    read_pairs,
    read_prediction_inputs,
    write_predictions,
)
from .metrics import exact_match, exact_match_rate, normalize
from .modeling import load_checkpoint, save_checkpoint
from .predicting import greedy_decode, predict
from .training import train

__all__ = [
    "TrainConfig",
    "TsvFormatError",
    "exact_match",
    "exact_match_rate",
    "greedy_decode",
    "load_checkpoint",
    "normalize",
    "predict",
    "read_pairs",
    "read_prediction_inputs",
    "save_checkpoint",
    "train",
    "write_predictions",
]

__version__ = "0.1.0"
