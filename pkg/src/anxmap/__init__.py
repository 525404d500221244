"""Naive Bayes anxiety classification and spatio-temporal exploration
of geotagged short messages."""

from .classifier import (
    CLASS_ORDER,
    ClassificationResult,
    ClassifierConfig,
    ClassifierModel,
    ClassLabel,
    classify_map,
    classify_ratio,
    load_model,
    save_model,
    sequence_log_likelihood,
    train,
    word_likelihood,
)
from .evaluation import EvalReport, SweepPoint, evaluate, select_threshold, sweep
from .geostore import GeoStore, GridCell, Message, RegionAggregate, TimeRange, cell_of
from .tokenizer import (
    SIGNIFICANT_POS,
    Token,
    fallback_tokenize,
    filter_significant,
    parse_tagged_text,
    serialize_tagged,
)

__version__ = "0.1.0"

__all__ = [
    "CLASS_ORDER",
    "ClassLabel",
    "ClassificationResult",
    "ClassifierConfig",
    "ClassifierModel",
    "EvalReport",
    "GeoStore",
    "GridCell",
    "Message",
    "RegionAggregate",
    "SIGNIFICANT_POS",
    "SweepPoint",
    "TimeRange",
    "Token",
    "cell_of",
    "classify_map",
    "classify_ratio",
    "evaluate",
    "fallback_tokenize",
    "filter_significant",
    "load_model",
    "parse_tagged_text",
    "save_model",
    "select_threshold",
    "sequence_log_likelihood",
    "serialize_tagged",
    "sweep",
    "train",
    "word_likelihood",
]
