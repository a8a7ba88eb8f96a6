import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sensornet.colorspace import (
    Direction,
    FormatMismatch,
    PixelRGB,
    PixelYCbCr,
    convert_image,
    rgb_to_ycbcr,
    rgb_to_ycbcr_planes,
    ycbcr_to_rgb,
)
from sensornet.types import ImageBuffer, PixelFormat

# frozen from the pre-build scan: exhaustive 17^3 lattice + 1e5 random pixels
# both gave a max-channel roundtrip error of 2
ROUNDTRIP_MAX_ERR = 2

LATTICE = list(range(0, 256, 16)) + [255]


def scalar_oracle_fwd(r, g, b):
    """Direct evaluation of the printed scalar forward formulas."""

    def rc(x):
        v = math.floor(abs(x) + 0.5)
        return min(255, max(0, v if x >= 0 else -v))

    return (
        rc(0.299 * r + 0.587 * g + 0.114 * b),
        rc(-0.169 * r + -0.332 * g + 0.500 * b + 128),
        rc(0.500 * r + -0.419 * g + -0.0813 * b + 128),
    )


def scalar_oracle_inv(y, cb, cr):
    def rc(x):
        v = math.floor(abs(x) + 0.5)
        return min(255, max(0, v if x >= 0 else -v))

    return (
        rc(y + 1.402 * (cr - 128)),
        rc(y - 0.334 * (cb - 128) - 0.714 * (cr - 128)),
        rc(y + 1.772 * (cb - 128)),
    )


def test_examples_forward():
    assert rgb_to_ycbcr((0, 0, 0)) == (0, 128, 128)
    assert rgb_to_ycbcr((255, 255, 255)) == (255, 128, 128)
    assert rgb_to_ycbcr((255, 0, 0)) == (76, 85, 255)


def test_examples_inverse():
    assert ycbcr_to_rgb((0, 128, 128)) == (0, 0, 0)
    assert ycbcr_to_rgb((255, 128, 128)) == (255, 255, 255)
    # scalar oracle value; computed pre-build from the printed inverse matrix
    assert ycbcr_to_rgb((76, 85, 255)) == (254, 0, 0)


def test_lattice_matches_scalar_oracle_exactly():
    for r, g, b in itertools.product(LATTICE, repeat=3):
        assert tuple(rgb_to_ycbcr((r, g, b))) == scalar_oracle_fwd(r, g, b)


def test_lattice_inverse_matches_scalar_oracle():
    for y, cb, cr in itertools.product(LATTICE, repeat=3):
        assert tuple(ycbcr_to_rgb((y, cb, cr))) == scalar_oracle_inv(y, cb, cr)


def test_roundtrip_bound_lattice_and_random():
    worst = 0
    for r, g, b in itertools.product(LATTICE, repeat=3):
        rr, gg, bb = ycbcr_to_rgb(rgb_to_ycbcr((r, g, b)))
        worst = max(worst, abs(rr - r), abs(gg - g), abs(bb - b))
    rng = np.random.default_rng(20240901)
    px = rng.integers(0, 256, size=(100_000, 3))
    y, cb, cr = rgb_to_ycbcr_planes(px.reshape(1, -1, 3).astype(np.uint8))
    img = ImageBuffer(PixelFormat.YCBCR, np.stack([y, cb, cr], axis=-1))
    back = convert_image(img, Direction.TO_RGB).data.reshape(-1, 3).astype(int)
    worst = max(worst, int(np.abs(back - px).max()))
    assert worst <= ROUNDTRIP_MAX_ERR
    assert worst == ROUNDTRIP_MAX_ERR  # frozen constant stays tight


@given(st.integers(0, 255))
def test_gray_axis_property(v):
    _, cb, cr = rgb_to_ycbcr((v, v, v))
    assert abs(cb - 128) <= 1
    assert abs(cr - 128) <= 1


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_scalar_matches_oracle_random(r, g, b):
    assert tuple(rgb_to_ycbcr((r, g, b))) == scalar_oracle_fwd(r, g, b)
    assert tuple(ycbcr_to_rgb((r, g, b))) == scalar_oracle_inv(r, g, b)


def test_determinism_repeat_runs():
    rng = np.random.default_rng(7)
    px = rng.integers(0, 256, size=(64, 64, 3)).astype(np.uint8)
    img = ImageBuffer(PixelFormat.RGB, px)
    a = convert_image(img, "to_ycbcr")
    b = convert_image(img, "to_ycbcr")
    assert a == b


def test_convert_image_matches_scalar_per_pixel():
    rng = np.random.default_rng(11)
    px = rng.integers(0, 256, size=(13, 9, 3)).astype(np.uint8)
    out = convert_image(ImageBuffer(PixelFormat.RGB, px), Direction.TO_YCBCR)
    assert out.pixel_format is PixelFormat.YCBCR
    assert (out.height, out.width) == (13, 9)
    for r in range(13):
        for c in range(9):
            assert tuple(out.data[r, c]) == tuple(rgb_to_ycbcr(tuple(px[r, c])))
    back = convert_image(out, Direction.TO_RGB)
    assert back.pixel_format is PixelFormat.RGB
    for r in range(13):
        for c in range(9):
            assert tuple(back.data[r, c]) == tuple(ycbcr_to_rgb(tuple(out.data[r, c])))


def test_convert_image_1x1_black():
    img = ImageBuffer(PixelFormat.RGB, np.zeros((1, 1, 3), np.uint8))
    out = convert_image(img, Direction.TO_YCBCR)
    assert tuple(out.data[0, 0]) == (0, 128, 128)


def test_convert_image_2x2_examples():
    px = np.array(
        [[[0, 0, 0], [255, 255, 255]], [[255, 0, 0], [0, 0, 255]]], np.uint8
    )
    out = convert_image(ImageBuffer(PixelFormat.RGB, px), Direction.TO_YCBCR)
    assert tuple(out.data[0, 0]) == (0, 128, 128)
    assert tuple(out.data[0, 1]) == (255, 128, 128)
    assert tuple(out.data[1, 0]) == (76, 85, 255)
    assert tuple(out.data[1, 1]) == scalar_oracle_fwd(0, 0, 255)


def test_convert_image_empty():
    img = ImageBuffer(PixelFormat.RGB, np.zeros((0, 0, 3), np.uint8))
    out = convert_image(img, Direction.TO_YCBCR)
    assert (out.width, out.height) == (0, 0)
    assert out.pixel_format is PixelFormat.YCBCR


def test_format_mismatch():
    gray = ImageBuffer(PixelFormat.GRAY, np.zeros((2, 2), np.uint8))
    with pytest.raises(FormatMismatch):
        convert_image(gray, Direction.TO_YCBCR)
    rgb = ImageBuffer(PixelFormat.RGB, np.zeros((2, 2, 3), np.uint8))
    with pytest.raises(FormatMismatch):
        convert_image(rgb, Direction.TO_RGB)


def test_named_tuples():
    p = rgb_to_ycbcr(PixelRGB(255, 0, 0))
    assert isinstance(p, PixelYCbCr)
    assert p.y == 76 and p.cb == 85 and p.cr == 255
