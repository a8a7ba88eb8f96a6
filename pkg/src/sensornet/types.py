"""Shared value types used across the protocol, codec, and simulator."""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np


class PixelFormat(enum.Enum):
    RGB = "rgb"
    YCBCR = "ycbcr"
    GRAY = "gray"
    CLASS_ID = "class_id"
    DEPTH = "depth"

    @property
    def channels(self) -> int:
        return 3 if self in (PixelFormat.RGB, PixelFormat.YCBCR) else 1


@dataclass
class ImageBuffer:
    """A width x height raster of 8-bit channels with a pixel-format tag.

    ``data`` is row-major uint8 with shape (height, width) for single-channel
    formats and (height, width, 3) for RGB/YCbCr.  Empty (0 x 0) images are
    legal.
    """

    pixel_format: PixelFormat
    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)
        want = 3 if self.pixel_format.channels == 3 else 2
        if self.data.ndim != want:
            raise ValueError(
                f"{self.pixel_format.value} image needs {want}-d data, got shape {self.data.shape}"
            )
        if want == 3 and self.data.shape[2] != 3:
            raise ValueError(f"expected 3 channels, got {self.data.shape[2]}")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def to_bytes(self) -> bytes:
        return self.data.tobytes()

    @classmethod
    def from_bytes(cls, pixel_format: PixelFormat, width: int, height: int, raw: bytes) -> "ImageBuffer":
        ch = pixel_format.channels
        if len(raw) != width * height * ch:
            raise ValueError(f"raster size mismatch: {len(raw)} != {width}x{height}x{ch}")
        shape = (height, width, 3) if ch == 3 else (height, width)
        return cls(pixel_format, np.frombuffer(raw, np.uint8).reshape(shape))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ImageBuffer)
            and self.pixel_format is other.pixel_format
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )


@dataclass
class PointCloud:
    """LIDAR returns: (x, y, z, intensity) float32 records in the vehicle frame."""

    points: np.ndarray = field(default_factory=lambda: np.empty((0, 4), np.float32))

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float32)
        if self.points.ndim != 2 or self.points.shape[1] != 4:
            raise ValueError(f"point cloud needs shape (n, 4), got {self.points.shape}")

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_bytes(self) -> bytes:
        # big-endian f32 on the wire
        return self.points.astype(">f4").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "PointCloud":
        if len(raw) % 16:
            raise ValueError("point cloud payload not a multiple of 16 bytes")
        pts = np.frombuffer(raw, ">f4").reshape(-1, 4).astype(np.float32)
        return cls(pts)

    def __eq__(self, other) -> bool:
        return isinstance(other, PointCloud) and np.array_equal(self.points, other.points)


@dataclass(frozen=True)
class VehicleState:
    """Planar vehicle pose plus speed and steering, advanced by the kinematic model."""

    x: float = 0.0
    y: float = 0.0
    heading_rad: float = 0.0
    speed_mps: float = 0.0
    steering_deg: float = 0.0
    sim_time_s: float = 0.0


@dataclass(frozen=True)
class GeoFix:
    latitude_deg: float
    longitude_deg: float
    speed_mps: float
    heading_deg: float

    _WIRE = struct.Struct(">dddd")

    def to_bytes(self) -> bytes:
        return self._WIRE.pack(self.latitude_deg, self.longitude_deg, self.speed_mps, self.heading_deg)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "GeoFix":
        return cls(*cls._WIRE.unpack(raw))
