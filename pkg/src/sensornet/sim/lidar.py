"""Raycast LIDAR: rays against the scene, range gating, dropout, range noise.

Rays sweep the horizontal field of view at the configured angular resolution
(azimuth_i = -fov/2 + i * resolution, relative to the vehicle heading) for
each channel; channel elevations span the vertical fov, a single channel
looks level.  Returns are reported in the vehicle frame with an intensity of
(min_range / d)^2 clamped to [0, 1] (reference distance 1 m when min_range
is zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..codec._kernels import KERNEL_LOCK  # noqa: F401  (lidar kernel is sequential)
from ..types import PointCloud, VehicleState
from .render import _box_t, _sphere_t
from .scene import FlatScene, Scene, flatten_scene


@dataclass(frozen=True)
class RangingSpec:
    min_range_m: float = 0.5
    max_range_m: float = 60.0
    range_noise_sigma_m: float = 0.0

    def validate(self):
        if not self.min_range_m < self.max_range_m:
            raise ValueError("min_range_m must be below max_range_m")
        if self.range_noise_sigma_m < 0:
            raise ValueError("noise sigma must be non-negative")


@dataclass(frozen=True)
class PhysicalSpec:
    mount_height_m: float = 1.8
    rotation_rate_hz: float = 10.0
    channels: int = 16

    def validate(self):
        if self.channels < 1:
            raise ValueError("channels must be at least 1")


@dataclass(frozen=True)
class LaserSpec:
    horizontal_fov_deg: float = 360.0
    angular_resolution_deg: float = 1.0
    vertical_fov_deg: float = 30.0

    def validate(self):
        if self.angular_resolution_deg <= 0:
            raise ValueError("angular resolution must be positive")
        if not 0 < self.horizontal_fov_deg <= 360:
            raise ValueError("horizontal fov must be in (0, 360]")
        if self.vertical_fov_deg < 0:
            raise ValueError("vertical fov must be non-negative")


@dataclass(frozen=True)
class OpticalSpec:
    dropout_probability: float = 0.0

    def validate(self):
        if not 0.0 <= self.dropout_probability < 1.0:
            raise ValueError("dropout probability must be in [0, 1)")


@dataclass(frozen=True)
class LidarConfig:
    ranging: RangingSpec = field(default_factory=RangingSpec)
    physical: PhysicalSpec = field(default_factory=PhysicalSpec)
    laser: LaserSpec = field(default_factory=LaserSpec)
    optical: OpticalSpec = field(default_factory=OpticalSpec)

    def validate(self):
        self.ranging.validate()
        self.physical.validate()
        self.laser.validate()
        self.optical.validate()

    @property
    def rays_per_channel(self) -> int:
        return round(self.laser.horizontal_fov_deg / self.laser.angular_resolution_deg)

    @property
    def ray_count(self) -> int:
        return self.physical.channels * self.rays_per_channel


@njit(nogil=True, cache=True)
def _lidar_trace(ox, oy, oz, heading, elevs, az0, daz, nh, spheres, boxes, dirs, ts):
    ch = math.cos(heading)
    sh = math.sin(heading)
    n = 0
    for e in range(elevs.shape[0]):
        ce = math.cos(elevs[e])
        se = math.sin(elevs[e])
        for k in range(nh):
            az = az0 + k * daz
            vx = ce * math.cos(az)
            vy = ce * math.sin(az)
            vz = se
            dirs[n, 0] = vx
            dirs[n, 1] = vy
            dirs[n, 2] = vz
            dx = ch * vx - sh * vy
            dy = sh * vx + ch * vy
            dz = vz
            t_best = 1.0e30
            if dz < -1e-12 and oz > 0.0:
                t_best = -oz / dz
            for i in range(spheres.shape[0]):
                t = _sphere_t(ox, oy, oz, dx, dy, dz,
                              spheres[i, 0], spheres[i, 1], spheres[i, 2], spheres[i, 3])
                if 0.0 < t < t_best:
                    t_best = t
            for i in range(boxes.shape[0]):
                t, _, _ = _box_t(ox, oy, oz, dx, dy, dz,
                                 boxes[i, 0], boxes[i, 1], boxes[i, 2],
                                 boxes[i, 3], boxes[i, 4], boxes[i, 5],
                                 boxes[i, 6], boxes[i, 7])
                if 0.0 < t < t_best:
                    t_best = t
            ts[n] = t_best
            n += 1


def lidar_scan(
    scene: Scene | FlatScene,
    cfg: LidarConfig,
    vehicle_pose: VehicleState,
    rng_seed: int = 0,
) -> PointCloud:
    """One full sweep.  Identical (scene, cfg, pose, seed) give identical clouds."""
    cfg.validate()
    flat = scene if isinstance(scene, FlatScene) else flatten_scene(scene)
    nh = cfg.rays_per_channel
    chans = cfg.physical.channels
    if chans > 1:
        elevs = np.radians(np.linspace(-cfg.laser.vertical_fov_deg / 2,
                                       cfg.laser.vertical_fov_deg / 2, chans))
    else:
        elevs = np.zeros(1)
    az0 = math.radians(-cfg.laser.horizontal_fov_deg / 2)
    daz = math.radians(cfg.laser.angular_resolution_deg)
    nrays = chans * nh
    dirs = np.empty((nrays, 3))
    ts = np.empty(nrays)
    ox = vehicle_pose.x
    oy = vehicle_pose.y
    oz = cfg.physical.mount_height_m
    _lidar_trace(ox, oy, oz, vehicle_pose.heading_rad, elevs, az0, daz, nh,
                 flat.spheres.astype(np.float64), flat.boxes.astype(np.float64), dirs, ts)

    rng = np.random.default_rng(rng_seed)
    dropout = rng.random(nrays)
    noise = rng.standard_normal(nrays) * cfg.ranging.range_noise_sigma_m
    keep = (
        (ts >= cfg.ranging.min_range_m)
        & (ts <= cfg.ranging.max_range_m)
        & (dropout >= cfg.optical.dropout_probability)
    )
    d_true = ts[keep]
    d_meas = d_true + noise[keep]
    ref = cfg.ranging.min_range_m if cfg.ranging.min_range_m > 0 else 1.0
    intensity = np.minimum(1.0, (ref / d_true) ** 2)
    pts = np.empty((int(keep.sum()), 4), np.float32)
    pts[:, 0] = d_meas * dirs[keep, 0]
    pts[:, 1] = d_meas * dirs[keep, 1]
    pts[:, 2] = oz + d_meas * dirs[keep, 2]
    pts[:, 3] = intensity
    return PointCloud(pts)
