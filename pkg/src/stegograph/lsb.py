"""k-bit LSB insertion into the channel bytes of a cover image.

Slots are the cover's channel bytes in row-major pixel order, R, G, B
within each pixel. Payload bytes are consumed MSB-first and each group of
``k`` bits goes into one slot, first-consumed bit in the highest of the
``k`` positions. Bits of a slot that no payload bit reaches keep their
cover value.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, ConfigurationError, RangeError
from .image import RgbImage

DEFAULT_BITS_PER_SLOT = 2
BITS_PER_SLOT_CHOICES = (1, 2, 3)


def check_bits_per_slot(k) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or int(k) not in BITS_PER_SLOT_CHOICES:
        raise ConfigurationError(f"bits per slot must be one of {BITS_PER_SLOT_CHOICES}, got {k!r}")
    return int(k)


def capacity_bits(image: RgbImage, k: int = DEFAULT_BITS_PER_SLOT) -> int:
    return image.n_slots * check_bits_per_slot(k)


def _slot_bits(values: np.ndarray, k: int) -> np.ndarray:
    """Low ``k`` bits of each slot as a ``(n, k)`` matrix, MSB first."""
    out = np.empty((values.size, k), dtype=np.uint8)
    for j in range(k):
        np.bitwise_and(values >> (k - 1 - j), 1, out=out[:, j])
    return out


def _pack_slot_bits(bits: np.ndarray, k: int) -> np.ndarray:
    vals = bits[:, 0].copy()
    for j in range(1, k):
        vals <<= 1
        vals |= bits[:, j]
    return vals


def _slot_span(bit_start: int, nbits: int, k: int) -> tuple[int, int, int]:
    first = bit_start // k
    stop = -(-(bit_start + nbits) // k)
    return first, stop, bit_start - first * k


def read_bits(flat: np.ndarray, bit_start: int, nbits: int, k: int) -> np.ndarray:
    """Embedded bits ``[bit_start, bit_start + nbits)`` as a uint8 0/1 array."""
    if nbits == 0:
        return np.zeros(0, dtype=np.uint8)
    first, stop, skip = _slot_span(bit_start, nbits, k)
    if bit_start < 0 or stop > flat.size:
        raise RangeError(
            f"reading {nbits} bits from bit {bit_start} needs slots up to {stop}, image has {flat.size}"
        )
    return _slot_bits(flat[first:stop], k).reshape(-1)[skip:skip + nbits]


def write_bits(flat: np.ndarray, bit_start: int, bits: np.ndarray, k: int) -> None:
    """Write 0/1 ``bits`` in place, preserving every bit outside the window."""
    nbits = bits.size
    if nbits == 0:
        return
    first, stop, skip = _slot_span(bit_start, nbits, k)
    if bit_start < 0 or stop > flat.size:
        raise RangeError(
            f"writing {nbits} bits from bit {bit_start} needs slots up to {stop}, image has {flat.size}"
        )
    window = flat[first:stop]
    current = _slot_bits(window, k)
    current.reshape(-1)[skip:skip + nbits] = bits
    keep = np.uint8(0xFF ^ ((1 << k) - 1))
    flat[first:stop] = (window & keep) | _pack_slot_bits(current, k)


class BitCursor:
    """Sequential reader/writer over the embedded bitstream of one image.

    Writes go to a private copy of the pixels; call :meth:`to_image` for
    the result. Not safe to share between threads.
    """

    def __init__(self, image: RgbImage, bits_per_slot: int = DEFAULT_BITS_PER_SLOT, slot_index: int = 0):
        self.image = image
        self.bits_per_slot = check_bits_per_slot(bits_per_slot)
        if not 0 <= slot_index <= image.n_slots:
            raise RangeError(f"slot index {slot_index} outside 0..{image.n_slots}")
        self.bit_position = slot_index * self.bits_per_slot
        self._flat = image.pixels.reshape(-1)
        self._owned = False

    @property
    def slot_index(self) -> int:
        return self.bit_position // self.bits_per_slot

    @property
    def remaining_bits(self) -> int:
        return self.image.n_slots * self.bits_per_slot - self.bit_position

    def read(self, byte_count: int) -> bytes:
        bits = read_bits(self._flat, self.bit_position, byte_count * 8, self.bits_per_slot)
        self.bit_position += byte_count * 8
        return np.packbits(bits).tobytes()

    def write(self, data: bytes) -> BitCursor:
        bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        if bits.size > self.remaining_bits:
            raise CapacityError(
                f"{bits.size} bits do not fit: {self.remaining_bits} bits left of "
                f"{self.image.n_slots * self.bits_per_slot}",
                required_bits=bits.size,
                available_bits=self.remaining_bits,
            )
        if not self._owned:
            self._flat = self._flat.copy()
            self._owned = True
        write_bits(self._flat, self.bit_position, bits, self.bits_per_slot)
        self.bit_position += bits.size
        return self

    def to_image(self) -> RgbImage:
        if not self._owned:
            return self.image
        return RgbImage._adopt(self._flat.copy().reshape(self.image.shape))


def embed(cover: RgbImage, payload: bytes, k: int = DEFAULT_BITS_PER_SLOT) -> RgbImage:
    """Return a copy of ``cover`` carrying ``payload`` from slot 0."""
    k = check_bits_per_slot(k)
    required = len(payload) * 8
    available = capacity_bits(cover, k)
    if required > available:
        raise CapacityError(
            f"payload needs {required} bits, cover offers {available} at {k} bit(s) per slot",
            required_bits=required,
            available_bits=available,
        )
    cursor = BitCursor(cover, k)
    cursor.write(payload)
    # the cursor's buffer is private to this call
    if not cursor._owned:
        return cover
    return RgbImage._adopt(cursor._flat.reshape(cover.shape))


def extract(stego: RgbImage, byte_count: int, start_slot: int = 0, k: int = DEFAULT_BITS_PER_SLOT) -> bytes:
    """Read ``byte_count`` bytes starting at ``start_slot``."""
    k = check_bits_per_slot(k)
    if byte_count < 0 or start_slot < 0:
        raise RangeError("byte_count and start_slot must be non-negative")
    bits = read_bits(stego.pixels.reshape(-1), start_slot * k, byte_count * 8, k)
    return np.packbits(bits).tobytes()
