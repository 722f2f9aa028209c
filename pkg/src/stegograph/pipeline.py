"""Encode payload images across covers and decode them back."""

from __future__ import annotations

import hashlib
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .chunking import DEFAULT_CHUNK_SIZE, Chunk, format_positions, merge_chunks, split_chunks
from .errors import (
    CapacityError,
    ConfigurationError,
    CorruptionError,
    IncompletePayloadError,
    NoStegoFoundError,
    NotStegoError,
    SkippedImageWarning,
    TruncationError,
)
from .image import RgbImage, flatten, reshape
from .lsb import DEFAULT_BITS_PER_SLOT, BitCursor, check_bits_per_slot, embed
from .manifest import (
    PREFIX_SIZE,
    CoverManifest,
    PayloadMetadata,
    build_directory,
    encode_header,
    entry_json_size,
    parse_header,
    read_prefix,
    serialize_segment,
    split_chunk_section,
)
from .validation import check_chunk_size, check_image, check_images, check_shape

IDENTITY = "identity"
XOR_KEYSTREAM = "xor-keystream"


@dataclass(frozen=True)
class TransformSpec:
    """Reversible byte transform applied to each payload before chunking.

    ``xor-keystream`` XORs with SHA-256 in counter mode: block ``i`` of the
    stream is ``sha256(key || i as 8-byte big endian)``. It hides payload
    statistics but is not a vetted cipher.
    """

    kind: str = IDENTITY
    key: bytes = b""

    def __post_init__(self):
        if self.kind not in (IDENTITY, XOR_KEYSTREAM):
            raise ConfigurationError(f"unknown transform {self.kind!r}")
        if self.kind == XOR_KEYSTREAM and not self.key:
            raise ConfigurationError("xor-keystream needs a non-empty key")

    @classmethod
    def xor(cls, key: bytes | str) -> TransformSpec:
        if isinstance(key, str):
            key = bytes.fromhex(key)
        return cls(XOR_KEYSTREAM, bytes(key))


def keystream(key: bytes, length: int) -> bytes:
    blocks = -(-length // 32)
    stream = b"".join(hashlib.sha256(key + i.to_bytes(8, "big")).digest() for i in range(blocks))
    return stream[:length]


def apply_transform(data: bytes, spec: TransformSpec | None) -> bytes:
    """Apply ``spec`` to ``data``; applying it twice gives ``data`` back."""
    if spec is None or spec.kind == IDENTITY:
        return bytes(data)
    if not spec.key:
        raise ConfigurationError("xor-keystream needs a non-empty key")
    buf = np.frombuffer(bytes(data), dtype=np.uint8)
    ks = np.frombuffer(keystream(spec.key, buf.size), dtype=np.uint8)
    return (buf ^ ks).tobytes()


@dataclass(frozen=True)
class CapacityPlan:
    bits_per_slot: int
    cover_capacity_bits: tuple[int, ...]
    assignments: tuple[tuple[tuple[int, int], ...], ...]
    segment_bytes: tuple[int, ...]
    total_payload_bytes: int
    total_overhead_bytes: int

    @property
    def total_capacity_bits(self) -> int:
        return sum(self.cover_capacity_bits)

    @property
    def total_segment_bytes(self) -> int:
        return sum(self.segment_bytes)

    @property
    def utilization(self) -> float:
        return self.total_segment_bytes * 8 / self.total_capacity_bits

    @property
    def overhead_fraction(self) -> float:
        return self.total_overhead_bytes / self.total_payload_bytes

    @property
    def total_slots(self) -> int:
        return self.total_capacity_bits // self.bits_per_slot

    @property
    def used_slots(self) -> int:
        k = self.bits_per_slot
        return sum(-(-n * 8 // k) for n in self.segment_bytes)

    @property
    def payload_slots(self) -> int:
        return -(-self.total_payload_bytes * 8 // self.bits_per_slot)

    def summary(self) -> dict:
        return {
            "covers": len(self.cover_capacity_bits),
            "bits_per_slot": self.bits_per_slot,
            "capacity_slots": self.total_slots,
            "capacity_bytes": self.total_capacity_bits // 8,
            "payload_bytes": self.total_payload_bytes,
            "overhead_bytes": self.total_overhead_bytes,
            "segment_bytes": self.total_segment_bytes,
            "utilization": round(self.utilization, 6),
            "overhead_fraction": round(self.overhead_fraction, 6),
            "chunks_per_cover": [len(a) for a in self.assignments],
        }


def _payload_metadata(payloads: Sequence, chunk_size: int) -> list[PayloadMetadata]:
    metas = []
    for pid, item in enumerate(payloads):
        if isinstance(item, (int, np.integer)) and not isinstance(item, bool):
            if item < 3 or item % 3:
                raise ConfigurationError(f"payload {pid}: byte count {item} is not a positive multiple of 3")
            height, width = 1, int(item) // 3
        else:
            height, width = check_shape(item, f"payloads[{pid}]")
        metas.append(PayloadMetadata.for_shape(pid, height, width, chunk_size))
    return metas


def _cover_slots(covers: Sequence) -> list[int]:
    slots = []
    for i, item in enumerate(covers):
        height, width = check_shape(item, f"covers[{i}]")
        slots.append(height * width * 3)
    return slots


def _plan(cover_slots: Sequence[int], metas: Sequence[PayloadMetadata], k: int) -> CapacityPlan:
    capacities = [n * k for n in cover_slots]
    total_payload = sum(m.total_bytes for m in metas)
    if total_payload * 8 > sum(capacities):
        raise CapacityError(
            f"payloads need at least {total_payload * 8} bits, covers offer {sum(capacities)} bits",
            required_bits=total_payload * 8,
            available_bits=sum(capacities),
        )

    queue = [(m.payload_id, pos, m.chunk_length(pos)) for m in metas for pos in range(m.chunk_count)]
    n_covers = len(cover_slots)
    cursor = 0
    assignments, segment_bytes, overhead = [], [], 0
    for index, cap_bits in enumerate(capacities):
        limit = cap_bits // 8
        empty = CoverManifest(len(metas), n_covers, index, metas, ())
        used = PREFIX_SIZE + len(encode_header(empty))
        if used > limit:
            raise CapacityError(
                f"cover {index} offers {cap_bits} bits, its segment header alone needs {used * 8}",
                required_bits=used * 8,
                available_bits=cap_bits,
            )
        header = used
        carried, offset = [], 0
        while cursor < len(queue):
            pid, pos, length = queue[cursor]
            entry = entry_json_size(pid, pos, offset, length) + (1 if carried else 0)
            if used + entry + length > limit:
                break
            used += entry + length
            header += entry
            offset += length
            carried.append((pid, pos))
            cursor += 1
        assignments.append(tuple(carried))
        segment_bytes.append(used)
        overhead += header

    if cursor < len(queue):
        left = queue[cursor:]
        short = sum(length + entry_json_size(pid, pos, 0, length) + 1 for pid, pos, length in left)
        required = (sum(segment_bytes) + short) * 8
        raise CapacityError(
            f"{len(left)} chunk(s) left after the last cover: need about {required} bits, "
            f"covers offer {sum(capacities)} bits",
            required_bits=required,
            available_bits=sum(capacities),
        )
    return CapacityPlan(k, tuple(capacities), tuple(assignments), tuple(segment_bytes), total_payload, overhead)


def plan(covers: Sequence, payloads: Sequence, chunk_size: int = DEFAULT_CHUNK_SIZE,
         k: int = DEFAULT_BITS_PER_SLOT) -> CapacityPlan:
    """Assign chunks to covers by greedy serial fill.

    Covers are filled in the given order. Chunks are taken in payload
    order, then graph position order. A chunk goes into the current
    cover while the serialized segment still fits, and the header size is
    counted exactly. ``covers`` items may be images or ``(height, width)``
    tuples. ``payloads`` items may be images, ``(height, width)`` tuples or
    byte counts.
    """
    k = check_bits_per_slot(k)
    chunk_size = check_chunk_size(chunk_size)
    if not covers:
        raise ConfigurationError("need at least one cover")
    if not payloads:
        raise ConfigurationError("need at least one payload")
    return _plan(_cover_slots(covers), _payload_metadata(payloads, chunk_size), k)


def encode_with_plan(payloads: Sequence, covers: Sequence, chunk_size: int = DEFAULT_CHUNK_SIZE,
                     k: int = DEFAULT_BITS_PER_SLOT, transform: TransformSpec | None = None):
    k = check_bits_per_slot(k)
    chunk_size = check_chunk_size(chunk_size)
    payloads = check_images(payloads, "payloads")
    covers = check_images(covers, "covers")

    metas = [PayloadMetadata.for_shape(pid, p.height, p.width, chunk_size) for pid, p in enumerate(payloads)]
    layout = _plan([c.n_slots for c in covers], metas, k)

    chunks: dict[tuple[int, int], Chunk] = {}
    for pid, payload in enumerate(payloads):
        flat = apply_transform(flatten(payload).bytes, transform)
        for chunk in split_chunks(flat, chunk_size, pid):
            chunks[(pid, chunk.graph_position)] = chunk

    stegos = []
    for index, (cover, carried) in enumerate(zip(covers, layout.assignments)):
        own = [chunks[key] for key in carried]
        manifest = CoverManifest(len(metas), len(covers), index, metas, build_directory(own))
        segment = serialize_segment(manifest, own)
        assert len(segment) == layout.segment_bytes[index], "planner and serializer disagree on segment size"
        stegos.append(embed(cover, segment, k))
    return stegos, layout


def encode(payloads: Sequence, covers: Sequence, chunk_size: int = DEFAULT_CHUNK_SIZE,
           k: int = DEFAULT_BITS_PER_SLOT, transform: TransformSpec | None = None) -> list[RgbImage]:
    """Hide ``payloads`` in ``covers``; returns one stego image per cover.

    Every cover receives a segment, so covers that carry no chunk still
    identify themselves to the decoder.
    """
    return encode_with_plan(payloads, covers, chunk_size, k, transform)[0]


def read_segment(stego: RgbImage, k: int = DEFAULT_BITS_PER_SLOT) -> tuple[CoverManifest, list[Chunk]]:
    """Stream one segment out of a stego image."""
    stego = check_image(stego, "stego")
    cursor = BitCursor(stego, k)
    if cursor.remaining_bits < PREFIX_SIZE * 8:
        raise NotStegoError(f"{stego!r} is too small to hold a segment prefix")
    prefix = cursor.read(PREFIX_SIZE)
    header_length = read_prefix(prefix)
    if header_length * 8 > cursor.remaining_bits:
        raise TruncationError(
            f"header claims {header_length} bytes, image holds {cursor.remaining_bits // 8} more",
            header_length,
            cursor.remaining_bits // 8,
        )
    header = cursor.read(header_length)
    manifest = parse_header(header)
    body_length = manifest.chunk_section_length
    if body_length * 8 > cursor.remaining_bits:
        raise TruncationError(
            f"chunk section needs {body_length} bytes, image holds {cursor.remaining_bits // 8} more",
            body_length,
            cursor.remaining_bits // 8,
        )
    return manifest, split_chunk_section(manifest, cursor.read(body_length))


def decode(stegos: Iterable, k: int = DEFAULT_BITS_PER_SLOT,
           transform: TransformSpec | None = None) -> list[RgbImage]:
    """Recover every payload from stego images given in any order.

    Images without a segment are skipped with a
    :class:`~stegograph.errors.SkippedImageWarning`. The result is ordered
    by payload id.
    """
    k = check_bits_per_slot(k)
    stegos = check_images(stegos, "stegos")

    segments = {}
    reference = None
    for i, image in enumerate(stegos):
        try:
            manifest, chunks = read_segment(image, k)
        except NotStegoError as exc:
            warnings.warn(SkippedImageWarning(f"stegos[{i}] skipped: {exc}", index=i), stacklevel=2)
            continue
        summary = (manifest.num_payload_images, manifest.num_cover_images, manifest.payloads)
        if reference is None:
            reference = summary
        elif summary != reference:
            raise CorruptionError(f"stegos[{i}] describes a different job than the other stego images")
        previous = segments.get(manifest.cover_index)
        if previous is not None and previous != (manifest, chunks):
            raise CorruptionError(f"two different stego images claim cover index {manifest.cover_index}")
        segments[manifest.cover_index] = (manifest, chunks)

    if reference is None:
        raise NoStegoFoundError(f"none of the {len(stegos)} image(s) carries a stego segment")

    n_payloads, n_covers, metas = reference
    pooled = defaultdict(list)
    for _, chunks in segments.values():
        for chunk in chunks:
            pooled[chunk.payload_id].append(chunk)

    seen = sorted(segments)
    missing = {}
    for meta in metas:
        got = {c.graph_position for c in pooled[meta.payload_id]}
        gap = [pos for pos in range(meta.chunk_count) if pos not in got]
        if gap:
            missing[meta.payload_id] = gap
    if missing:
        absent = [i for i in range(n_covers) if i not in segments]
        first = min(missing)
        detail = "; ".join(f"payload {pid} lacks graph positions {format_positions(gap)}" for pid, gap in sorted(missing.items()))
        err = IncompletePayloadError(
            f"{detail}. The job used {n_covers} cover(s); got cover(s) {seen}, missing cover(s) {absent}",
            payload_id=first,
            missing=missing[first],
            expected_covers=n_covers,
            seen_covers=seen,
        )
        err.missing_by_payload = missing
        raise err

    recovered = []
    for meta in sorted(metas, key=lambda m: m.payload_id):
        flat = merge_chunks(pooled[meta.payload_id], meta.chunk_count)
        recovered.append(reshape(apply_transform(flat, transform), meta.width, meta.height))
    return recovered
