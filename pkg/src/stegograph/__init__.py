"""Hide several payload images across several cover images.

Payloads are flattened channel-planar, cut into chunks and spread over
the covers in order. Each cover carries a JSON mapping graph that
locates its chunks, embedded with k-bit LSB insertion.
"""

__version__ = "0.1.0"

from .chunking import Chunk, merge_chunks, split_chunks
from .errors import (
    CapacityError,
    CorruptionError,
    IncompletePayloadError,
    InputFormatError,
    NoStegoFoundError,
    NotStegoError,
    ShapeError,
    SkippedImageWarning,
    StegoError,
    TruncationError,
)
from .estimators import CombDetector, HistogramFeatures, MultiImageStego
from .image import FlatChannels, RgbImage, flatten, reshape
from .lsb import BitCursor, capacity_bits, embed, extract
from .manifest import CoverManifest, PayloadMetadata, parse_segment, segment_overhead, serialize_segment
from .pipeline import CapacityPlan, TransformSpec, apply_transform, decode, encode, plan
from .steganalysis import comb_score, compare, histogram

__all__ = [
    "BitCursor", "CapacityError", "CapacityPlan", "Chunk", "CombDetector", "CorruptionError",
    "CoverManifest", "FlatChannels", "HistogramFeatures", "IncompletePayloadError", "InputFormatError",
    "MultiImageStego", "NoStegoFoundError", "NotStegoError", "PayloadMetadata", "RgbImage", "ShapeError",
    "SkippedImageWarning", "StegoError", "TransformSpec", "TruncationError", "apply_transform",
    "capacity_bits", "comb_score", "compare", "decode", "embed", "encode", "extract", "flatten",
    "histogram", "merge_chunks", "parse_segment", "plan", "reshape", "segment_overhead",
    "serialize_segment", "split_chunks",
]
