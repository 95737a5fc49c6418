"""Python bindings for the probe-bench core library.

Datasets are plain dicts with keys ``embeddings`` (float32, n x dim),
``labels``, ``groups`` (uint32), ``splits`` (uint8: 0 train, 1 validation,
2 test) and optionally ``class_count`` and ``group_count``. This is the same
layout an extractor hands to :func:`write_embs`.
"""

from ._probebench import (
    Error,
    FormatError,
    SpecError,
    TrainingError,
    aggregate,
    core_oracle_accuracy,
    decode_embs,
    emit_scatter,
    emit_table,
    encode_embs,
    fingerprint,
    generate,
    group_metrics,
    predict,
    read_embs,
    run_grid,
    train,
    write_embs,
)

SPLIT_TRAIN = 0
SPLIT_VALIDATION = 1
SPLIT_TEST = 2

__all__ = [
    "Error",
    "FormatError",
    "SpecError",
    "TrainingError",
    "SPLIT_TRAIN",
    "SPLIT_VALIDATION",
    "SPLIT_TEST",
    "aggregate",
    "core_oracle_accuracy",
    "decode_embs",
    "emit_scatter",
    "emit_table",
    "encode_embs",
    "fingerprint",
    "generate",
    "group_metrics",
    "predict",
    "read_embs",
    "run_grid",
    "train",
    "write_embs",
]
