"""Lossless image file I/O.

Only 8-bit RGB PNG (and 24-bit BMP on input) is accepted: a lossy or
palette container would destroy the embedded bits.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InputFormatError
from .image import RgbImage

READABLE_FORMATS = ("PNG", "BMP")
_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _check_png_header(head: bytes, path) -> None:
    # IHDR follows the signature: length(4) type(4) width(4) height(4) depth(1) color(1)
    if len(head) < 26 or head[12:16] != b"IHDR":
        raise InputFormatError(f"{path}: truncated PNG header")
    depth, color_type = head[24], head[25]
    if depth != 8 or color_type != 2:
        raise InputFormatError(
            f"{path}: PNG must be 8-bit RGB without alpha (bit depth {depth}, color type {color_type})"
        )


def load_image(path) -> RgbImage:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot read file ({exc.strerror or exc})") from exc
    try:
        with Image.open(io.BytesIO(raw)) as img:
            fmt = img.format
            if fmt not in READABLE_FORMATS:
                raise InputFormatError(f"{path}: {fmt or 'unknown'} is not a lossless format we read (PNG, BMP)")
            if img.mode != "RGB":
                raise InputFormatError(f"{path}: image mode {img.mode} is not 8-bit RGB")
            if fmt == "PNG":
                _check_png_header(raw[: len(_PNG_SIGNATURE) + 18], path)
            pixels = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise InputFormatError(f"{path}: not an image file") from exc
    except (OSError, SyntaxError) as exc:
        raise InputFormatError(f"{path}: damaged image file ({exc})") from exc
    return RgbImage(pixels)


def png_bytes(image: RgbImage) -> bytes:
    out = io.BytesIO()
    Image.fromarray(np.asarray(image.pixels)).save(out, format="PNG", compress_level=6)
    return out.getvalue()


def save_png(image: RgbImage, path) -> Path:
    """Write ``image`` as PNG through a temporary name and an atomic rename."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    try:
        tmp.write_bytes(png_bytes(image))
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()
    return path
