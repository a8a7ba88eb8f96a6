import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from sensornet import colorspace
from sensornet.codec import (
    ChromaSubsampling,
    DimensionOverflow,
    EncodingConfig,
    EncodingMode,
    MalformedBitstream,
    MalformedStream,
    compress_lossless,
    decode_lossy,
    decompress_lossless,
    encode_lossy,
    measure_pipeline,
    pack_ycbcr,
    psnr,
    quantized_blocks,
)
from sensornet.types import ImageBuffer, PixelFormat


def gradient_image(w, h):
    yy, xx = np.mgrid[0:h, 0:w]
    r = (xx * 255 / max(1, w - 1)).astype(np.uint8)
    g = (yy * 255 / max(1, h - 1)).astype(np.uint8)
    b = ((xx + yy) * 255 / max(1, w + h - 2)).astype(np.uint8)
    return ImageBuffer(PixelFormat.RGB, np.stack([r, g, b], axis=-1))


def blob_image(w, h, seed=3):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    img = np.zeros((h, w, 3))
    for _ in range(6):
        cx, cy = rng.uniform(0, w), rng.uniform(0, h)
        s = rng.uniform(8, 30)
        col = rng.uniform(40, 255, 3)
        img += np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))[..., None] * col
    return ImageBuffer(PixelFormat.RGB, np.clip(img, 0, 255).astype(np.uint8))


# --- lossless (gzip / DEFLATE) ------------------------------------------------


def test_gzip_empty_roundtrip():
    z = compress_lossless(b"")
    assert z[:2] == b"\x1f\x8b"
    assert decompress_lossless(z) == b""


def test_gzip_megabyte_of_zeros():
    z = compress_lossless(b"\x00" * 10**6)
    assert len(z) < 10**6 * 0.01
    assert decompress_lossless(z) == b"\x00" * 10**6


def test_gzip_bad_magic():
    z = bytearray(compress_lossless(b"hello"))
    z[0] ^= 0xFF
    with pytest.raises(MalformedStream):
        decompress_lossless(bytes(z))


def test_gzip_truncated():
    z = compress_lossless(b"hello world" * 100)
    with pytest.raises(MalformedStream):
        decompress_lossless(z[: len(z) // 2])


def test_gzip_deterministic():
    data = bytes(range(256)) * 17
    assert compress_lossless(data) == compress_lossless(data)


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=4096))
def test_gzip_roundtrip_property(blob):
    assert decompress_lossless(compress_lossless(blob)) == blob


def test_gzip_random_4k_blob():
    blob = np.random.default_rng(5).integers(0, 256, 4096).astype(np.uint8).tobytes()
    assert decompress_lossless(compress_lossless(blob)) == blob


# --- YCbCr packing ------------------------------------------------------------


def test_pack_2x2_420_is_6_bytes():
    img = gradient_image(2, 2)
    assert len(pack_ycbcr(img, "4:2:0")) == 6


def test_pack_640x480_420_is_half_raw():
    img = gradient_image(640, 480)
    packed = pack_ycbcr(img, "4:2:0")
    assert len(packed) == 460_800
    assert len(packed) * 2 == 640 * 480 * 3


def test_pack_1x1_444_matches_scalar_conversion():
    px = np.array([[[200, 30, 90]]], np.uint8)
    img = ImageBuffer(PixelFormat.RGB, px)
    packed = pack_ycbcr(img, ChromaSubsampling.CS_444)
    assert len(packed) == 3
    assert tuple(packed) == tuple(colorspace.rgb_to_ycbcr((200, 30, 90)))


@pytest.mark.parametrize("w,h", [(2, 2), (4, 6), (16, 16), (640, 480), (8, 2)])
def test_pack_420_size_law_even_dims(w, h):
    img = blob_image(w, h)
    assert len(pack_ycbcr(img, "4:2:0")) * 2 == w * h * 3


def test_pack_420_odd_dims_pad():
    img = blob_image(5, 3)
    expected = 5 * 3 + 2 * 3 * 2  # y + two ceil-half planes
    assert len(pack_ycbcr(img, "4:2:0")) == expected


def test_pack_needs_rgb():
    gray = ImageBuffer(PixelFormat.GRAY, np.zeros((4, 4), np.uint8))
    with pytest.raises(colorspace.FormatMismatch):
        pack_ycbcr(gray, "4:2:0")


def test_pack_444_planar_layout():
    img = gradient_image(3, 2)
    packed = pack_ycbcr(img, "4:4:4")
    y, cb, cr = colorspace.rgb_to_ycbcr_planes(img.data)
    assert packed == y.tobytes() + cb.tobytes() + cr.tobytes()


# --- lossy JPEG ---------------------------------------------------------------


def test_flat_color_survives_q75():
    px = np.full((64, 64, 3), (90, 140, 200), np.uint8)
    img = ImageBuffer(PixelFormat.RGB, px)
    out = decode_lossy(encode_lossy(img, 75))
    assert out.pixel_format is PixelFormat.RGB
    assert np.abs(out.data.astype(int) - px.astype(int)).max() <= 2


def test_flat_block_has_single_nonzero_coefficient():
    img = ImageBuffer(PixelFormat.GRAY, np.full((8, 8), 200, np.uint8))
    coefs, _ = quantized_blocks(img, 75)
    assert np.count_nonzero(coefs[0]) == 1
    assert coefs[0][0][0] != 0  # the DC term
    # the all-128 block level-shifts to zero, so even the DC vanishes
    img128 = ImageBuffer(PixelFormat.GRAY, np.full((8, 8), 128, np.uint8))
    coefs, _ = quantized_blocks(img128, 75)
    assert np.count_nonzero(coefs[0]) == 0


def test_dimension_checks():
    with pytest.raises(DimensionOverflow):
        encode_lossy(ImageBuffer(PixelFormat.RGB, np.zeros((1, 65536, 3), np.uint8)))
    with pytest.raises(ValueError):
        encode_lossy(ImageBuffer(PixelFormat.RGB, np.zeros((0, 0, 3), np.uint8)))


def test_decode_preserves_dimensions():
    for w, h in [(31, 17), (64, 64), (1, 1), (8, 24)]:
        img = blob_image(w, h)
        out = decode_lossy(encode_lossy(img, 95))
        assert (out.width, out.height) == (w, h)


def test_truncated_bitstream():
    img = blob_image(64, 64)
    bs = encode_lossy(img, 75)
    with pytest.raises(MalformedBitstream):
        decode_lossy(bs[: len(bs) // 2])


def test_garbage_bitstream():
    with pytest.raises(MalformedBitstream):
        decode_lossy(b"not a jpeg at all")
    with pytest.raises(MalformedBitstream):
        decode_lossy(b"\xff\xd8\xff\xd9")


def test_flat_gray_16x16_q50():
    img = ImageBuffer(PixelFormat.GRAY, np.full((16, 16), 128, np.uint8))
    out = decode_lossy(encode_lossy(img, 50))
    assert out.pixel_format is PixelFormat.GRAY
    assert np.abs(out.data.astype(int) - 128).max() <= 2


def test_encode_deterministic():
    img = blob_image(100, 60)
    assert encode_lossy(img, 75) == encode_lossy(img, 75)


def test_psnr_monotone_in_quality():
    img = blob_image(96, 96, seed=9)
    values = [psnr(img.data, decode_lossy(encode_lossy(img, q)).data) for q in (25, 50, 75, 95)]
    assert values == sorted(values)
    assert values[2] >= 30.0


@pytest.mark.parametrize("sub", ["4:2:0", "4:4:4"])
@pytest.mark.parametrize("w,h", [(64, 48), (63, 47), (16, 16), (5, 11), (129, 64)])
def test_third_party_decoder_agreement(w, h, sub):
    img = blob_image(w, h, seed=w * h)
    bs = encode_lossy(img, 75, sub)
    pil = np.asarray(Image.open(io.BytesIO(bs)).convert("RGB"))
    mine = decode_lossy(bs)
    assert np.abs(pil.astype(int) - mine.data.astype(int)).max() <= 1


def test_third_party_encoder_accepted():
    arr = blob_image(90, 70, seed=4).data
    for kwargs in [
        {"quality": 80},
        {"quality": 45, "subsampling": 2},
        {"quality": 70, "restart_marker_blocks": 3},
        {"quality": 70, "subsampling": 0},
    ]:
        buf = io.BytesIO()
        Image.fromarray(arr).save(buf, "JPEG", **kwargs)
        pil = np.asarray(Image.open(io.BytesIO(buf.getvalue())).convert("RGB"))
        mine = decode_lossy(buf.getvalue())
        assert np.abs(pil.astype(int) - mine.data.astype(int)).max() <= 1


def test_grayscale_third_party_agreement():
    arr = blob_image(57, 33, seed=8).data[:, :, 0]
    bs = encode_lossy(ImageBuffer(PixelFormat.GRAY, arr), 75)
    pil = np.asarray(Image.open(io.BytesIO(bs)).convert("L"))
    mine = decode_lossy(bs)
    assert mine.pixel_format is PixelFormat.GRAY
    assert np.abs(pil.astype(int) - mine.data.astype(int)).max() <= 1


# --- pipeline measurement ------------------------------------------------------


def default_configs(q=75):
    return [
        EncodingConfig(EncodingMode.RAW),
        EncodingConfig(EncodingMode.LOSSY, q),
        EncodingConfig(EncodingMode.YCBCR_PACKED),
        EncodingConfig(EncodingMode.LOSSY_PLUS_DEFLATE, q),
    ]


def test_measure_pipeline_raw_stage():
    img = blob_image(40, 30)
    report = measure_pipeline(img, [EncodingConfig(EncodingMode.RAW)])
    assert report.raw_bytes == 40 * 30 * 3
    assert report.stages[0].bytes == 40 * 30 * 3
    assert report.stages[0].reduction_percent == 0.0


def test_measure_pipeline_stages():
    img = blob_image(64, 64)
    report = measure_pipeline(img, default_configs())
    names = [s.name for s in report.stages]
    assert names[0] == "raw"
    assert all(s.error is None for s in report.stages)
    packed = report.stages[2]
    assert packed.bytes * 2 == report.raw_bytes
    assert packed.reduction_percent == pytest.approx(50.0)


def test_measure_pipeline_empty_configs():
    with pytest.raises(ValueError):
        measure_pipeline(blob_image(8, 8), [])


def test_measure_pipeline_failed_stage_marked():
    img = ImageBuffer(PixelFormat.RGB, np.zeros((1, 65_536, 3), np.uint8))
    report = measure_pipeline(
        img, [EncodingConfig(EncodingMode.RAW), EncodingConfig(EncodingMode.LOSSY)]
    )
    assert report.stages[0].error is None
    assert report.stages[1].error is not None
    assert report.stages[1].bytes is None


def test_incompressible_stage_reports_negative_reduction():
    rng = np.random.default_rng(0)
    img = ImageBuffer(PixelFormat.RGB, rng.integers(0, 256, (16, 16, 3)).astype(np.uint8))
    raw = img.to_bytes()
    grown = compress_lossless(raw)
    if len(grown) > len(raw):
        report = measure_pipeline(img, [EncodingConfig(EncodingMode.RAW)])
        report.add("gzip_raw", len(grown))
        assert report.stages[-1].reduction_percent < 0
