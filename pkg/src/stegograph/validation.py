"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .chunking import DEFAULT_CHUNK_SIZE
from .errors import ConfigurationError, ShapeError
from .image import RgbImage
from .lsb import check_bits_per_slot

__all__ = ["check_image", "check_images", "check_bits_per_slot", "check_chunk_size", "check_shape"]


def check_image(image, name: str = "image") -> RgbImage:
    """Coerce an :class:`RgbImage` or a ``(height, width, 3)`` array."""
    if isinstance(image, RgbImage):
        return image
    if isinstance(image, np.ndarray) or hasattr(image, "__array__"):
        try:
            return RgbImage(np.asarray(image))
        except ShapeError as exc:
            raise ShapeError(f"{name}: {exc}") from exc
    raise TypeError(f"{name} must be an RgbImage or a (height, width, 3) uint8 array, got {type(image).__name__}")


def check_images(images: Iterable, name: str = "images", min_count: int = 1) -> list[RgbImage]:
    if isinstance(images, (RgbImage, np.ndarray)) and getattr(images, "ndim", 4) == 3:
        raise TypeError(f"{name} must be a sequence of images, not a single image")
    out = [check_image(img, f"{name}[{i}]") for i, img in enumerate(images)]
    if len(out) < min_count:
        raise ConfigurationError(f"{name}: need at least {min_count} image(s), got {len(out)}")
    return out


def check_chunk_size(chunk_size) -> int:
    if chunk_size is None:
        return DEFAULT_CHUNK_SIZE
    if isinstance(chunk_size, bool) or not isinstance(chunk_size, (int, np.integer)) or chunk_size < 1:
        raise ConfigurationError(f"chunk_size must be a positive integer, got {chunk_size!r}")
    return int(chunk_size)


def check_shape(item, name: str = "image") -> tuple[int, int]:
    """``(height, width)`` of an image, array or explicit shape tuple."""
    if isinstance(item, RgbImage):
        return item.height, item.width
    if isinstance(item, np.ndarray):
        return check_image(item, name).shape[:2]
    if isinstance(item, tuple) and len(item) in (2, 3):
        height, width = int(item[0]), int(item[1])
        if height < 1 or width < 1 or (len(item) == 3 and item[2] != 3):
            raise ShapeError(f"{name}: invalid shape {item}")
        return height, width
    raise TypeError(f"{name} must be an image or a (height, width) tuple, got {type(item).__name__}")
