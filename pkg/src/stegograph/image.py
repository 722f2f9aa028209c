"""Image value model and the channel-planar flatmap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Immutable 8-bit, 3-channel raster.

    ``pixels`` has shape ``(height, width, 3)`` and dtype ``uint8``; it is
    stored read-only. Covers, stegos and payloads all use this type.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ShapeError(f"expected an array of shape (height, width, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"image must be at least 1x1, got {arr.shape[1]}x{arr.shape[0]}")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ShapeError(f"pixel values must be integers, got dtype {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ShapeError("pixel values must lie in 0..255")
            arr = arr.astype(np.uint8)
        else:
            arr = np.array(arr, dtype=np.uint8, order="C", copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def _adopt(cls, arr: np.ndarray) -> RgbImage:
        # Takes ownership of a freshly built uint8 array without copying it.
        arr.flags.writeable = False
        obj = object.__new__(cls)
        object.__setattr__(obj, "pixels", arr)
        return obj

    @classmethod
    def from_bytes(cls, width: int, height: int, data: bytes) -> RgbImage:
        """Build an image from row-major interleaved RGB bytes."""
        expected = width * height * 3
        if width < 1 or height < 1:
            raise ShapeError(f"image must be at least 1x1, got {width}x{height}")
        if len(data) != expected:
            raise ShapeError(f"expected {expected} bytes for a {width}x{height} image, got {len(data)}")
        arr = np.frombuffer(bytes(data), dtype=np.uint8).reshape(height, width, 3).copy()
        return cls._adopt(arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.pixels.shape

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    @property
    def n_slots(self) -> int:
        return self.pixels.size

    def __eq__(self, other):
        if not isinstance(other, RgbImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    def __repr__(self):
        return f"RgbImage(width={self.width}, height={self.height})"


@dataclass(frozen=True)
class FlatChannels:
    """Channel-planar bytes: all R rows, then all G rows, then all B rows."""

    bytes: bytes
    source_width: int
    source_height: int

    def __post_init__(self):
        expected = self.source_width * self.source_height * 3
        if len(self.bytes) != expected:
            raise ShapeError(
                f"flat buffer holds {len(self.bytes)} bytes, expected {expected} "
                f"for {self.source_width}x{self.source_height}"
            )


def flatten(image: RgbImage) -> FlatChannels:
    planar = np.ascontiguousarray(image.pixels.transpose(2, 0, 1))
    return FlatChannels(planar.tobytes(), image.width, image.height)


def reshape(flat: FlatChannels | bytes, width: int, height: int) -> RgbImage:
    """Inverse of :func:`flatten`.

    Raises :class:`ShapeError` when the byte count does not match
    ``width * height * 3``.
    """
    raw = flat.bytes if isinstance(flat, FlatChannels) else bytes(flat)
    expected = width * height * 3
    if width < 1 or height < 1:
        raise ShapeError(f"image must be at least 1x1, got {width}x{height}")
    if len(raw) != expected:
        raise ShapeError(f"cannot reshape {len(raw)} bytes to {width}x{height}x3: expected {expected}")
    planar = np.frombuffer(raw, dtype=np.uint8).reshape(3, height, width)
    return RgbImage._adopt(np.ascontiguousarray(planar.transpose(1, 2, 0)))
