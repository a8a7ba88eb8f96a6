"""BT.601 RGB <-> YCbCr conversion with 8-bit quantization and clamping.

The scalar coefficient sets below are applied per pixel, rounded
half-away-from-zero, and clamped to [0, 255].  The forward and inverse
coefficient sets are not exact inverses of each other; the roundtrip error
is bounded (see tests for the frozen regression constant).
"""

from __future__ import annotations

import enum
from typing import NamedTuple

import numpy as np

from .types import ImageBuffer, PixelFormat

# forward: Y  =  0.299 R + 0.587 G + 0.114 B
#          Cb = -0.169 R - 0.332 G + 0.500 B + 128
#          Cr =  0.500 R - 0.419 G - 0.0813 B + 128
FWD = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.169, -0.332, 0.500],
        [0.500, -0.419, -0.0813],
    ]
)
FWD_OFFSET = np.array([0.0, 128.0, 128.0])

# inverse: R = Y + 1.402 (Cr-128)
#          G = Y - 0.334 (Cb-128) - 0.714 (Cr-128)
#          B = Y + 1.772 (Cb-128)
INV = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.334, -0.714],
        [1.0, 1.772, 0.0],
    ]
)


class PixelRGB(NamedTuple):
    r: int
    g: int
    b: int


class PixelYCbCr(NamedTuple):
    y: int
    cb: int
    cr: int


class Direction(enum.Enum):
    TO_YCBCR = "to_ycbcr"
    TO_RGB = "to_rgb"


class FormatMismatch(ValueError):
    """Image pixel format does not match the conversion's source space."""


def _round_clamp(x: float) -> int:
    # round half away from zero, then clamp to the 8-bit range
    v = int(np.floor(abs(x) + 0.5))
    if x < 0:
        v = -v
    return min(255, max(0, v))


def rgb_to_ycbcr(p: PixelRGB | tuple[int, int, int]) -> PixelYCbCr:
    r, g, b = p
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = -0.169 * r + -0.332 * g + 0.500 * b + 128.0
    cr = 0.500 * r + -0.419 * g + -0.0813 * b + 128.0
    return PixelYCbCr(_round_clamp(y), _round_clamp(cb), _round_clamp(cr))


def ycbcr_to_rgb(p: PixelYCbCr | tuple[int, int, int]) -> PixelRGB:
    y, cb, cr = p
    r = y + 1.402 * (cr - 128.0)
    g = y - 0.334 * (cb - 128.0) - 0.714 * (cr - 128.0)
    b = y + 1.772 * (cb - 128.0)
    return PixelRGB(_round_clamp(r), _round_clamp(g), _round_clamp(b))


def _round_clamp_array(x: np.ndarray) -> np.ndarray:
    v = np.floor(np.abs(x) + 0.5)
    np.copysign(v, x, out=v)
    return np.clip(v, 0.0, 255.0).astype(np.uint8)


def rgb_to_ycbcr_planes(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized forward conversion of an (h, w, 3) uint8 array, per-pixel
    identical to :func:`rgb_to_ycbcr`."""
    r = rgb[..., 0].astype(np.float64)
    g = rgb[..., 1].astype(np.float64)
    b = rgb[..., 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = -0.169 * r + -0.332 * g + 0.500 * b + 128.0
    cr = 0.500 * r + -0.419 * g + -0.0813 * b + 128.0
    return _round_clamp_array(y), _round_clamp_array(cb), _round_clamp_array(cr)


def ycbcr_to_rgb_planes(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    yf = y.astype(np.float64)
    cbf = cb.astype(np.float64) - 128.0
    crf = cr.astype(np.float64) - 128.0
    r = yf + 1.402 * crf
    g = yf - 0.334 * cbf - 0.714 * crf
    b = yf + 1.772 * cbf
    return np.stack([_round_clamp_array(r), _round_clamp_array(g), _round_clamp_array(b)], axis=-1)


def convert_image(img: ImageBuffer, direction: Direction | str) -> ImageBuffer:
    """Per-pixel color conversion; dimensions unchanged, format tag flipped."""
    direction = Direction(direction)
    if direction is Direction.TO_YCBCR:
        if img.pixel_format is not PixelFormat.RGB:
            raise FormatMismatch(f"to_ycbcr needs RGB input, got {img.pixel_format.value}")
        if img.data.size == 0:
            return ImageBuffer(PixelFormat.YCBCR, img.data.reshape(img.data.shape))
        y, cb, cr = rgb_to_ycbcr_planes(img.data)
        return ImageBuffer(PixelFormat.YCBCR, np.stack([y, cb, cr], axis=-1))
    if img.pixel_format is not PixelFormat.YCBCR:
        raise FormatMismatch(f"to_rgb needs YCbCr input, got {img.pixel_format.value}")
    if img.data.size == 0:
        return ImageBuffer(PixelFormat.RGB, img.data.reshape(img.data.shape))
    out = ycbcr_to_rgb_planes(img.data[..., 0], img.data[..., 1], img.data[..., 2])
    return ImageBuffer(PixelFormat.RGB, out)
