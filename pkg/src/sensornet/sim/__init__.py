"""Desk-scale vehicle simulation: kinematics, raycast sensors, traffic."""

from .gps import EARTH_RADIUS_M, GpsOrigin, gps_fix
from .lidar import LaserSpec, LidarConfig, OpticalSpec, PhysicalSpec, RangingSpec, lidar_scan
from .render import (
    DEPTH_MAX_M,
    CameraConfig,
    CameraMount,
    render,
    road_feature_filter,
)
from .scene import (
    FlatScene,
    Ground,
    LaneMarking,
    NpcVehicle,
    Primitive,
    Scene,
    SceneError,
    flatten_scene,
    load_scene,
    scene_from_dict,
    tick_world,
)
from .vehicle import (
    MAX_ACCEL_MPS2,
    MAX_SPEED_MPS,
    STEERING_LIMIT_DEG,
    WHEELBASE_M,
    DriveCommand,
    clamp_steering,
    step,
)

__all__ = [
    "CameraConfig",
    "CameraMount",
    "DEPTH_MAX_M",
    "DriveCommand",
    "EARTH_RADIUS_M",
    "FlatScene",
    "GpsOrigin",
    "Ground",
    "LaneMarking",
    "LaserSpec",
    "LidarConfig",
    "MAX_ACCEL_MPS2",
    "MAX_SPEED_MPS",
    "NpcVehicle",
    "OpticalSpec",
    "PhysicalSpec",
    "Primitive",
    "RangingSpec",
    "STEERING_LIMIT_DEG",
    "Scene",
    "SceneError",
    "WHEELBASE_M",
    "clamp_steering",
    "flatten_scene",
    "gps_fix",
    "lidar_scan",
    "load_scene",
    "render",
    "road_feature_filter",
    "scene_from_dict",
    "step",
    "tick_world",
]
