"""Fixed-size chunking of payload bytes and order-independent reassembly."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigurationError, CorruptionError, IncompletePayloadError, StegoError

DEFAULT_CHUNK_SIZE = 512


@dataclass(frozen=True)
class Chunk:
    payload_id: int
    graph_position: int
    data: bytes

    def __post_init__(self):
        if self.payload_id < 0 or self.graph_position < 0:
            raise ValueError("payload_id and graph_position must be non-negative")
        if not self.data:
            raise ValueError("a chunk carries at least one byte")

    def __len__(self):
        return len(self.data)


def chunk_count(total_bytes: int, chunk_size: int) -> int:
    return -(-total_bytes // chunk_size)


def split_chunks(flat_bytes: bytes, chunk_size: int = DEFAULT_CHUNK_SIZE, payload_id: int = 0) -> list[Chunk]:
    """Cut ``flat_bytes`` into consecutive chunks; only the last may be short."""
    if chunk_size < 1:
        raise ConfigurationError(f"chunk_size must be >= 1, got {chunk_size}")
    if len(flat_bytes) == 0:
        raise StegoError("cannot split an empty payload")
    raw = bytes(flat_bytes)
    return [
        Chunk(payload_id, pos, raw[start:start + chunk_size])
        for pos, start in enumerate(range(0, len(raw), chunk_size))
    ]


def merge_chunks(chunks: Iterable[Chunk], expected_count: int) -> bytes:
    """Reassemble a payload from chunks given in any order.

    Exact duplicates are tolerated. A duplicate position with different
    bytes raises :class:`CorruptionError`; gaps raise
    :class:`IncompletePayloadError` listing every missing position.
    """
    by_position: dict[int, bytes] = {}
    payload_id = None
    for chunk in chunks:
        if payload_id is None:
            payload_id = chunk.payload_id
        elif chunk.payload_id != payload_id:
            raise StegoError(f"merge_chunks got chunks of payloads {payload_id} and {chunk.payload_id}")
        if chunk.graph_position >= expected_count:
            raise CorruptionError(
                f"payload {payload_id}: graph position {chunk.graph_position} is outside 0..{expected_count - 1}"
            )
        seen = by_position.get(chunk.graph_position)
        if seen is not None and seen != chunk.data:
            raise CorruptionError(
                f"payload {payload_id}: two different chunks claim graph position {chunk.graph_position}"
            )
        by_position[chunk.graph_position] = chunk.data

    missing = [pos for pos in range(expected_count) if pos not in by_position]
    if missing:
        raise IncompletePayloadError(
            f"payload {payload_id}: missing graph positions {format_positions(missing)}",
            payload_id=payload_id,
            missing=missing,
        )
    return b"".join(by_position[pos] for pos in range(expected_count))


def format_positions(positions: list[int]) -> str:
    """Render sorted positions as ``0-3, 7, 9-12``."""
    if not positions:
        return ""
    parts = []
    start = prev = positions[0]
    for pos in positions[1:] + [None]:
        if pos is not None and pos == prev + 1:
            prev = pos
            continue
        parts.append(str(start) if start == prev else f"{start}-{prev}")
        if pos is not None:
            start = prev = pos
    return ", ".join(parts)
