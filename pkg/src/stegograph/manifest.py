"""Stego segment codec.

A segment is the byte string embedded into one cover::

    b"JKVG1" | header_length (u32, big endian) | JSON header | chunk bytes

The JSON header is the mapping graph for that cover. It is written
canonically: fixed key order, no whitespace. The key order is
``num_payload_images, num_cover_images, cover_index, payloads, directory``.
``payloads`` lists the metadata of every payload in the job, and
``directory`` lists only the chunks stored in this segment, one
``[payload_id, graph_position, offset, length, "crc16"]`` tuple per chunk.
Chunk bytes follow the header raw, in directory order.
"""

from __future__ import annotations

import binascii
import json
import struct
from dataclasses import dataclass, field
from typing import Sequence

from .chunking import Chunk, chunk_count
from .errors import ConsistencyError, CorruptionError, ManifestCorruptionError, NotStegoError, TruncationError

MAGIC = b"JKVG1"
PREFIX_SIZE = len(MAGIC) + 4
CHANNELS = 3

_HEADER_KEYS = ("num_payload_images", "num_cover_images", "cover_index", "payloads", "directory")
_PAYLOAD_KEYS = ("payload_id", "height", "width", "channels", "chunk_count", "chunk_size", "total_bytes")
# "[" + 4 commas + '"xxxx"' + "]"
_ENTRY_FIXED_CHARS = 1 + 4 + 6 + 1


def checksum(data: bytes) -> str:
    """CRC-16/XMODEM of ``data`` as four lowercase hex digits."""
    return f"{binascii.crc_hqx(data, 0):04x}"


@dataclass(frozen=True)
class PayloadMetadata:
    payload_id: int
    height: int
    width: int
    channels: int = CHANNELS
    chunk_count: int = 0
    chunk_size: int = 512
    total_bytes: int = 0

    @classmethod
    def for_shape(cls, payload_id: int, height: int, width: int, chunk_size: int) -> PayloadMetadata:
        total = height * width * CHANNELS
        return cls(payload_id, height, width, CHANNELS, chunk_count(total, chunk_size), chunk_size, total)

    def validate(self):
        if any(not isinstance(getattr(self, k), int) or isinstance(getattr(self, k), bool) for k in _PAYLOAD_KEYS):
            raise ManifestCorruptionError(f"payload metadata fields must be integers: {self}")
        if self.payload_id < 0 or self.height < 1 or self.width < 1 or self.chunk_size < 1:
            raise ManifestCorruptionError(f"payload metadata out of range: {self}")
        if self.channels != CHANNELS:
            raise ManifestCorruptionError(f"payload {self.payload_id}: channels must be 3, got {self.channels}")
        if self.total_bytes != self.height * self.width * self.channels:
            raise ManifestCorruptionError(f"payload {self.payload_id}: total_bytes disagrees with its shape")
        if self.chunk_count != chunk_count(self.total_bytes, self.chunk_size):
            raise ManifestCorruptionError(f"payload {self.payload_id}: chunk_count disagrees with total_bytes")

    def chunk_length(self, graph_position: int) -> int:
        if graph_position == self.chunk_count - 1:
            return self.total_bytes - self.chunk_size * (self.chunk_count - 1)
        return self.chunk_size

    def to_json(self) -> dict:
        return {key: getattr(self, key) for key in _PAYLOAD_KEYS}


@dataclass(frozen=True)
class ChunkDirectoryEntry:
    payload_id: int
    graph_position: int
    offset: int
    length: int
    crc: str

    def to_json(self) -> list:
        return [self.payload_id, self.graph_position, self.offset, self.length, self.crc]

    @property
    def json_size(self) -> int:
        return entry_json_size(self.payload_id, self.graph_position, self.offset, self.length)


@dataclass(frozen=True)
class CoverManifest:
    num_payload_images: int
    num_cover_images: int
    cover_index: int
    payloads: tuple[PayloadMetadata, ...]
    directory: tuple[ChunkDirectoryEntry, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "payloads", tuple(self.payloads))
        object.__setattr__(self, "directory", tuple(self.directory))

    @property
    def chunk_section_length(self) -> int:
        return sum(entry.length for entry in self.directory)

    def to_json(self) -> dict:
        return {
            "num_payload_images": self.num_payload_images,
            "num_cover_images": self.num_cover_images,
            "cover_index": self.cover_index,
            "payloads": [p.to_json() for p in self.payloads],
            "directory": [e.to_json() for e in self.directory],
        }

    def validate(self):
        for name in ("num_payload_images", "num_cover_images", "cover_index"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ManifestCorruptionError(f"{name} must be an integer, got {value!r}")
        if self.num_cover_images < 1 or not 0 <= self.cover_index < self.num_cover_images:
            raise ManifestCorruptionError(
                f"cover_index {self.cover_index} outside 0..{self.num_cover_images - 1}"
            )
        if self.num_payload_images != len(self.payloads) or not self.payloads:
            raise ManifestCorruptionError(
                f"num_payload_images is {self.num_payload_images} but {len(self.payloads)} payloads are described"
            )
        known = {}
        for meta in self.payloads:
            meta.validate()
            if meta.payload_id in known:
                raise ManifestCorruptionError(f"payload {meta.payload_id} is described twice")
            known[meta.payload_id] = meta
        offset = 0
        carried = set()
        for entry in self.directory:
            meta = known.get(entry.payload_id)
            if meta is None:
                raise ManifestCorruptionError(f"directory references unknown payload {entry.payload_id}")
            if not 0 <= entry.graph_position < meta.chunk_count:
                raise ManifestCorruptionError(
                    f"payload {entry.payload_id}: graph position {entry.graph_position} out of range"
                )
            if entry.offset != offset:
                raise ManifestCorruptionError(
                    f"directory entry for ({entry.payload_id}, {entry.graph_position}) starts at "
                    f"{entry.offset}, expected {offset}"
                )
            if entry.length != meta.chunk_length(entry.graph_position):
                raise ManifestCorruptionError(
                    f"directory entry for ({entry.payload_id}, {entry.graph_position}) has length "
                    f"{entry.length}, expected {meta.chunk_length(entry.graph_position)}"
                )
            if (entry.payload_id, entry.graph_position) in carried:
                raise ManifestCorruptionError(
                    f"directory lists chunk ({entry.payload_id}, {entry.graph_position}) twice"
                )
            carried.add((entry.payload_id, entry.graph_position))
            offset += entry.length


def entry_json_size(payload_id: int, graph_position: int, offset: int, length: int) -> int:
    """Serialized size of one directory entry, without its separating comma."""
    return _ENTRY_FIXED_CHARS + sum(len(str(v)) for v in (payload_id, graph_position, offset, length))


def build_directory(chunks: Sequence[Chunk]) -> tuple[ChunkDirectoryEntry, ...]:
    entries = []
    offset = 0
    for chunk in chunks:
        entries.append(
            ChunkDirectoryEntry(chunk.payload_id, chunk.graph_position, offset, len(chunk.data), checksum(chunk.data))
        )
        offset += len(chunk.data)
    return tuple(entries)


def encode_header(manifest: CoverManifest) -> bytes:
    return json.dumps(manifest.to_json(), separators=(",", ":"), ensure_ascii=True).encode("ascii")


def serialize_segment(manifest: CoverManifest, chunks: Sequence[Chunk]) -> bytes:
    """Frame ``manifest`` and the raw bytes of ``chunks`` into one segment.

    ``chunks`` must match ``manifest.directory`` one-to-one and in order.
    """
    try:
        manifest.validate()
    except ManifestCorruptionError as exc:
        raise ConsistencyError(f"refusing to serialize an invalid manifest: {exc}") from exc
    if len(chunks) != len(manifest.directory):
        raise ConsistencyError(
            f"directory lists {len(manifest.directory)} chunks but {len(chunks)} were given"
        )
    offset = 0
    for entry, chunk in zip(manifest.directory, chunks):
        if (entry.payload_id, entry.graph_position) != (chunk.payload_id, chunk.graph_position):
            raise ConsistencyError(
                f"directory entry ({entry.payload_id}, {entry.graph_position}) paired with chunk "
                f"({chunk.payload_id}, {chunk.graph_position})"
            )
        if entry.offset != offset or entry.length != len(chunk.data):
            raise ConsistencyError(
                f"directory entry ({entry.payload_id}, {entry.graph_position}) has offset/length "
                f"{entry.offset}/{entry.length}, chunk needs {offset}/{len(chunk.data)}"
            )
        if entry.crc != checksum(chunk.data):
            raise ConsistencyError(f"checksum mismatch for chunk ({entry.payload_id}, {entry.graph_position})")
        offset += entry.length

    header = encode_header(manifest)
    return b"".join([MAGIC, struct.pack(">I", len(header)), header, *(c.data for c in chunks)])


def read_prefix(prefix: bytes) -> int:
    """Check the magic and return the header length."""
    if len(prefix) < len(MAGIC) or prefix[: len(MAGIC)] != MAGIC:
        if len(prefix) < len(MAGIC) and MAGIC.startswith(bytes(prefix)):
            raise TruncationError(
                f"segment prefix needs {PREFIX_SIZE} bytes, got {len(prefix)}", PREFIX_SIZE, len(prefix)
            )
        raise NotStegoError(f"bad magic {bytes(prefix[:len(MAGIC)])!r}, expected {MAGIC!r}")
    if len(prefix) < PREFIX_SIZE:
        raise TruncationError(f"segment prefix needs {PREFIX_SIZE} bytes, got {len(prefix)}", PREFIX_SIZE, len(prefix))
    return struct.unpack(">I", prefix[len(MAGIC):PREFIX_SIZE])[0]


def parse_header(header: bytes) -> CoverManifest:
    try:
        pairs = json.loads(bytes(header).decode("utf-8"), object_pairs_hook=list)
    except (UnicodeDecodeError, ValueError) as exc:
        raise ManifestCorruptionError(f"header is not valid JSON: {exc}") from exc
    if not isinstance(pairs, list) or [k for k, _ in pairs] != list(_HEADER_KEYS):
        raise ManifestCorruptionError(f"header keys must be {list(_HEADER_KEYS)} in this order")
    raw = dict(pairs)
    try:
        payloads = tuple(_parse_payload(p) for p in raw["payloads"])
        directory = tuple(_parse_entry(e) for e in raw["directory"])
        manifest = CoverManifest(
            raw["num_payload_images"], raw["num_cover_images"], raw["cover_index"], payloads, directory
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise ManifestCorruptionError(f"malformed header: {exc}") from exc
    manifest.validate()
    return manifest


def _parse_payload(pairs) -> PayloadMetadata:
    if not isinstance(pairs, list) or [k for k, _ in pairs] != list(_PAYLOAD_KEYS):
        raise ValueError(f"payload metadata must have keys {list(_PAYLOAD_KEYS)}")
    return PayloadMetadata(**dict(pairs))


def _parse_entry(item) -> ChunkDirectoryEntry:
    if not isinstance(item, list) or len(item) != 5:
        raise ValueError(f"directory entry must be a 5-element array, got {item!r}")
    *numbers, crc = item
    if not all(type(v) is int and v >= 0 for v in numbers):
        raise ValueError(f"directory entry numbers must be non-negative integers: {item!r}")
    if not isinstance(crc, str) or len(crc) != 4 or crc.strip("0123456789abcdef"):
        raise ValueError(f"directory entry checksum must be 4 hex digits: {item!r}")
    return ChunkDirectoryEntry(*numbers, crc)


def parse_segment(data: bytes) -> tuple[CoverManifest, list[Chunk]]:
    """Inverse of :func:`serialize_segment`. Trailing bytes are ignored."""
    data = memoryview(bytes(data))
    header_length = read_prefix(bytes(data[:PREFIX_SIZE]))
    header_end = PREFIX_SIZE + header_length
    if len(data) < header_end:
        raise TruncationError(
            f"segment header needs {header_end} bytes, only {len(data)} available", header_end, len(data)
        )
    manifest = parse_header(bytes(data[PREFIX_SIZE:header_end]))
    total = header_end + manifest.chunk_section_length
    if len(data) < total:
        raise TruncationError(
            f"segment needs {total} bytes, only {len(data)} available ({total - len(data)} missing)",
            total,
            len(data),
        )
    return manifest, split_chunk_section(manifest, data[header_end:total])


def split_chunk_section(manifest: CoverManifest, body) -> list[Chunk]:
    """Cut the raw chunk bytes after a header into checked chunks."""
    body = memoryview(body)
    chunks = []
    for entry in manifest.directory:
        piece = bytes(body[entry.offset:entry.offset + entry.length])
        if checksum(piece) != entry.crc:
            raise CorruptionError(
                f"chunk ({entry.payload_id}, {entry.graph_position}) in cover {manifest.cover_index} "
                f"fails its checksum"
            )
        chunks.append(Chunk(entry.payload_id, entry.graph_position, piece))
    return chunks


def segment_overhead(manifest: CoverManifest) -> int:
    """Bytes of the segment that are not payload: prefix plus JSON header."""
    return PREFIX_SIZE + len(encode_header(manifest))
