"""Range tau-majority encodings.

Build a compact structure from an array once, discard the array, and later
ask for the tau'-majorities (elements occurring more than tau' * length
times) of any range, for any tau' at or above the build threshold.  Answers
are positions in the array.
"""

from .accel import PieceIndex, accel_build, query_fast, query_fast_many
from .bitvec import PlainBitvec, SparseBitvec, plain_build, sparse_build
from .encoding import (
    MajorityEncoding,
    MultiEncoding,
    QueryAnswer,
    build,
    deserialize,
    deserialize_multi,
    load,
    multi_build,
    multi_query,
    serialize,
    serialize_multi,
)
from .errors import FormatError, InvalidThreshold, RangeError, ThresholdTooLow
from .oracle import oracle_batch, oracle_count, oracle_query
from .runbv import RunBitvec, SparseRunBitvec, run_build

__all__ = [
    "FormatError",
    "InvalidThreshold",
    "MajorityEncoding",
    "MultiEncoding",
    "PieceIndex",
    "PlainBitvec",
    "QueryAnswer",
    "RangeError",
    "RunBitvec",
    "SparseBitvec",
    "SparseRunBitvec",
    "ThresholdTooLow",
    "accel_build",
    "build",
    "deserialize",
    "deserialize_multi",
    "load",
    "multi_build",
    "multi_query",
    "oracle_batch",
    "oracle_count",
    "oracle_query",
    "plain_build",
    "query_fast",
    "query_fast_many",
    "run_build",
    "serialize",
    "serialize_multi",
    "sparse_build",
]
