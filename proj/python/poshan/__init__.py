"""Python access to the POSHAN C++ core."""

import json

from ._poshan import (
    ConfigError,
    DataError,
    MetricError,
    PoshanError,
    cardinal_patterns,
    default_config,
    derive,
    fallback_tags,
    gradcheck,
    macro_f1,
    roc_auc,
    split_sentences,
    tokenize,
    train,
)
from ._poshan import evaluate as _evaluate


def evaluate(ckpt, test):
    """Evaluate a checkpoint on a derived JSON Lines file; returns the report dict."""
    return json.loads(_evaluate(str(ckpt), str(test)))


__all__ = [
    "ConfigError",
    "DataError",
    "MetricError",
    "PoshanError",
    "cardinal_patterns",
    "default_config",
    "derive",
    "evaluate",
    "fallback_tags",
    "gradcheck",
    "macro_f1",
    "roc_auc",
    "split_sentences",
    "tokenize",
    "train",
]
