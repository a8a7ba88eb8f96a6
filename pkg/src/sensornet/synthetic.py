"""Builtin deterministic test content: the reference road scene and a small
image corpus for codec fidelity checks."""

from __future__ import annotations

import numpy as np

from .sim import CameraConfig, CameraMount, Scene, render, scene_from_dict
from .types import ImageBuffer, PixelFormat

# Mirrored 1:1 by scenes/minimal.json (kept in both places so the installed
# package needs no data files while the CLI still has a file to point at).
MINIMAL_SCENE = {
    "ground": {"class_id": 1, "albedo": [95, 95, 100]},
    "primitives": [
        {
            "shape": "box",
            "position": [60.0, 0.0, 1.5],
            "dimensions": [0.5, 14.0, 3.0],
            "yaw_deg": 0.0,
            "class_id": 2,
            "albedo": [165, 70, 55],
        },
        {
            "shape": "sphere",
            "position": [18.0, -3.0, 1.0],
            "radius": 1.0,
            "class_id": 3,
            "albedo": [70, 130, 200],
        },
    ],
    "lane_markings": [
        {"start": [0.0, -3.5], "end": [120.0, -3.5], "width": 0.2, "class_id": 4},
        {"start": [0.0, 0.0], "end": [120.0, 0.0], "width": 0.15, "class_id": 4},
        {"start": [0.0, 3.5], "end": [120.0, 3.5], "width": 0.2, "class_id": 4},
    ],
    "npc_vehicles": [
        {
            "waypoints": [[12.0, 2.2], [40.0, 2.2], [40.0, 5.5], [12.0, 5.5]],
            "speed_mps": 5.0,
            "dimensions": [4.2, 1.8, 1.5],
            "class_id": 5,
            "albedo": [210, 180, 60],
        }
    ],
}


def road_scene() -> Scene:
    """A fresh copy of the builtin scene: one wall, one sphere, one NPC loop."""
    return scene_from_dict(MINIMAL_SCENE)


_VARIANTS = [
    CameraMount(x=0.4, y=0.0, z=1.2, yaw_deg=0.0, pitch_deg=0.0),
    CameraMount(x=0.4, y=0.0, z=1.2, yaw_deg=22.0, pitch_deg=-4.0),
    CameraMount(x=0.0, y=1.5, z=2.4, yaw_deg=-15.0, pitch_deg=-10.0),
]


def road_frame(width: int = 640, height: int = 480, variant: int = 0) -> ImageBuffer:
    """Deterministic render of the builtin road scene."""
    cam = CameraConfig(width, height, 90.0, _VARIANTS[variant % len(_VARIANTS)])
    from .types import VehicleState

    return render(road_scene(), cam, VehicleState(), "rgb")


def gradient_frame(width: int = 640, height: int = 480) -> ImageBuffer:
    yy, xx = np.mgrid[0:height, 0:width]
    r = (xx * 255 / max(1, width - 1)).astype(np.uint8)
    g = (yy * 255 / max(1, height - 1)).astype(np.uint8)
    b = ((xx + yy) * 255 / max(1, width + height - 2)).astype(np.uint8)
    return ImageBuffer(PixelFormat.RGB, np.stack([r, g, b], axis=-1))


def blob_frame(width: int = 640, height: int = 480, seed: int = 11) -> ImageBuffer:
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    img = np.zeros((height, width, 3))
    for _ in range(8):
        cx, cy = rng.uniform(0, width), rng.uniform(0, height)
        s = rng.uniform(15, 80)
        col = rng.uniform(30, 255, 3)
        img += np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))[..., None] * col
    return ImageBuffer(PixelFormat.RGB, np.clip(img, 0, 255).astype(np.uint8))


def corpus() -> list[tuple[str, ImageBuffer]]:
    """The fixed image corpus used by codec fidelity checks."""
    return [
        ("road_640x480", road_frame(640, 480, 0)),
        ("road_turned", road_frame(640, 480, 1)),
        ("road_high", road_frame(640, 480, 2)),
        ("gradient", gradient_frame(640, 480)),
        ("blobs", blob_frame(640, 480)),
    ]
