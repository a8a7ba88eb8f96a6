"""Compression pipeline: lossy JPEG coding, chroma-subsampled YCbCr packing,
gzip/DEFLATE, and stage-by-stage size accounting.

All operations are pure with respect to their inputs and deterministic:
repeated calls on identical inputs produce identical bytes.
"""

from __future__ import annotations

import enum
import gzip as _gzip
import zlib
from dataclasses import dataclass, field

import numpy as np

from .. import colorspace
from ..types import ImageBuffer, PixelFormat
from .jpeg import (
    CodecError,
    DimensionOverflow,
    MalformedBitstream,
    decode_lossy,
    encode_lossy,
    psnr,
    quantized_blocks,
)

__all__ = [
    "ChromaSubsampling",
    "CodecError",
    "DimensionOverflow",
    "EncodingConfig",
    "EncodingMode",
    "MalformedBitstream",
    "MalformedStream",
    "PipelineStage",
    "SizeReport",
    "compress_lossless",
    "decode_lossy",
    "decompress_lossless",
    "encode_lossy",
    "measure_pipeline",
    "pack_ycbcr",
    "psnr",
    "quantized_blocks",
]


class MalformedStream(CodecError):
    """Bad gzip header, trailer, or DEFLATE stream."""


class EncodingMode(enum.Enum):
    RAW = "raw"
    YCBCR_PACKED = "ycbcr_packed"
    LOSSY = "lossy"
    LOSSY_PLUS_DEFLATE = "lossy_plus_deflate"


class ChromaSubsampling(enum.Enum):
    CS_444 = "4:4:4"
    CS_420 = "4:2:0"


@dataclass(frozen=True)
class EncodingConfig:
    mode: EncodingMode
    quality: int = 75  # meaningful for lossy modes only
    chroma_subsampling: ChromaSubsampling = ChromaSubsampling.CS_420

    def stage_name(self) -> str:
        if self.mode in (EncodingMode.LOSSY, EncodingMode.LOSSY_PLUS_DEFLATE):
            return f"{self.mode.value} q{self.quality} {self.chroma_subsampling.value}"
        if self.mode is EncodingMode.YCBCR_PACKED:
            return f"{self.mode.value} {self.chroma_subsampling.value}"
        return self.mode.value


@dataclass(frozen=True)
class PipelineStage:
    name: str
    bytes: int | None
    reduction_percent: float | None
    error: str | None = None


@dataclass
class SizeReport:
    """Byte counts per pipeline stage relative to the raw raster size."""

    raw_bytes: int
    stages: list[PipelineStage] = field(default_factory=list)

    def add(self, name: str, nbytes: int):
        self.stages.append(
            PipelineStage(name, nbytes, 100.0 * (1.0 - nbytes / self.raw_bytes))
        )

    def add_failed(self, name: str, error: str):
        self.stages.append(PipelineStage(name, None, None, error))


def compress_lossless(data: bytes) -> bytes:
    """gzip (RFC 1952) container over a DEFLATE stream; fixed mtime so the
    output is bit-identical across runs."""
    return _gzip.compress(bytes(data), compresslevel=9, mtime=0)


def decompress_lossless(data: bytes) -> bytes:
    try:
        return _gzip.decompress(bytes(data))
    except (_gzip.BadGzipFile, zlib.error, EOFError, OSError) as e:
        raise MalformedStream(str(e)) from None


def pack_ycbcr(img: ImageBuffer, subsampling: ChromaSubsampling | str = ChromaSubsampling.CS_420) -> bytes:
    """Planar YCbCr bytes (Y plane, then Cb, then Cr).

    4:2:0 averages each 2x2 chroma quad after conversion; odd dimensions are
    edge-replicated first, so even-dimension images pack to exactly half the
    raw RGB size.
    """
    subsampling = ChromaSubsampling(subsampling)
    if img.pixel_format is not PixelFormat.RGB:
        raise colorspace.FormatMismatch(f"pack_ycbcr needs RGB, got {img.pixel_format.value}")
    if img.data.size == 0:
        return b""
    y, cb, cr = colorspace.rgb_to_ycbcr_planes(img.data)
    if subsampling is ChromaSubsampling.CS_444:
        return y.tobytes() + cb.tobytes() + cr.tobytes()
    h, w = y.shape
    if h % 2 or w % 2:
        pad = ((0, h % 2), (0, w % 2))
        cb = np.pad(cb, pad, mode="edge")
        cr = np.pad(cr, pad, mode="edge")
    cb4 = cb.reshape(cb.shape[0] // 2, 2, cb.shape[1] // 2, 2).astype(np.uint16)
    cr4 = cr.reshape(cr.shape[0] // 2, 2, cr.shape[1] // 2, 2).astype(np.uint16)
    cb_sub = ((cb4.sum(axis=(1, 3)) + 2) >> 2).astype(np.uint8)
    cr_sub = ((cr4.sum(axis=(1, 3)) + 2) >> 2).astype(np.uint8)
    return y.tobytes() + cb_sub.tobytes() + cr_sub.tobytes()


def measure_pipeline(img: ImageBuffer, configs: list[EncodingConfig]) -> SizeReport:
    """Run each configured encoder on ``img`` and report measured sizes.

    A failing stage is recorded as failed instead of aborting the report.
    """
    if not configs:
        raise ValueError("at least one encoding config required")
    if img.pixel_format is not PixelFormat.RGB:
        raise colorspace.FormatMismatch("pipeline measures RGB images")
    if img.data.size == 0:
        raise ValueError("image must be non-empty")
    report = SizeReport(raw_bytes=img.width * img.height * 3)
    for cfg in configs:
        name = cfg.stage_name()
        try:
            if cfg.mode is EncodingMode.RAW:
                n = len(img.to_bytes())
            elif cfg.mode is EncodingMode.YCBCR_PACKED:
                n = len(pack_ycbcr(img, cfg.chroma_subsampling))
            elif cfg.mode is EncodingMode.LOSSY:
                n = len(encode_lossy(img, cfg.quality, cfg.chroma_subsampling.value))
            else:
                n = len(
                    compress_lossless(encode_lossy(img, cfg.quality, cfg.chroma_subsampling.value))
                )
            report.add(name, n)
        except CodecError as e:
            report.add_failed(name, str(e))
    return report
