"""Raycast cameras: RGB (Lambert-shaded), semantic class IDs, quantized depth,
and the road-feature filter.

One primary ray per pixel, pinhole projection, square pixels.  Camera frame:
+x forward, +y left, +z up, mounted on the vehicle.  Rays through pixel
centers; odd image dimensions put the center pixel exactly on the optical
axis.  Depth is the Euclidean hit distance quantized to 8 bits over
[0, 100 m]; 255 on miss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from ..codec._kernels import KERNEL_LOCK
from ..colorspace import rgb_to_ycbcr_planes
from ..types import ImageBuffer, PixelFormat, VehicleState
from .scene import FlatScene, Scene, flatten_scene

DEPTH_MAX_M = 100.0
SKY_RGB = (135, 206, 235)
AMBIENT = 0.35
# fixed directional light (pointing down-forward-right), unit length
_L = np.array([0.35, -0.25, -0.90])
LIGHT_DIR = tuple(_L / np.linalg.norm(_L))

SOBEL_THRESHOLD = 96.0


@dataclass(frozen=True)
class CameraMount:
    x: float = 0.4
    y: float = 0.0
    z: float = 1.2
    yaw_deg: float = 0.0
    pitch_deg: float = 0.0


@dataclass(frozen=True)
class CameraConfig:
    width: int = 640
    height: int = 480
    horizontal_fov_deg: float = 90.0
    mount: CameraMount = field(default_factory=CameraMount)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("camera dimensions must be at least 1x1")
        if not 0.0 < self.horizontal_fov_deg < 180.0:
            raise ValueError("horizontal fov must be in (0, 180)")


@njit(nogil=True, cache=True)
def _sphere_t(ox, oy, oz, dx, dy, dz, cx, cy, cz, rad):
    ocx = cx - ox
    ocy = cy - oy
    ocz = cz - oz
    b = dx * ocx + dy * ocy + dz * ocz
    disc = b * b - (ocx * ocx + ocy * ocy + ocz * ocz - rad * rad)
    if disc < 0.0:
        return np.float64(-1.0)
    sq = math.sqrt(disc)
    t = b - sq
    if t < 1e-6:
        t = b + sq
    if t < 1e-6:
        return np.float64(-1.0)
    return np.float64(t)


@njit(nogil=True, cache=True)
def _box_t(ox, oy, oz, dx, dy, dz, bx, by, bz, hx, hy, hz, cy_, sy_):
    """Slab test in the box frame.  Returns (t, axis, sign); t < 0 on miss."""
    px = ox - bx
    py = oy - by
    pz = oz - bz
    lox = cy_ * px + sy_ * py
    loy = -sy_ * px + cy_ * py
    loz = pz
    ldx = cy_ * dx + sy_ * dy
    ldy = -sy_ * dx + cy_ * dy
    ldz = dz
    tmin = -1.0e30
    tmax = 1.0e30
    axis = -1
    sign = 1.0
    for a in range(3):
        if a == 0:
            o, d, hh = lox, ldx, hx
        elif a == 1:
            o, d, hh = loy, ldy, hy
        else:
            o, d, hh = loz, ldz, hz
        if abs(d) < 1e-12:
            if abs(o) > hh:
                return np.float64(-1.0), -1, 1.0
        else:
            inv = 1.0 / d
            t1 = (-hh - o) * inv
            t2 = (hh - o) * inv
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
                axis = a
                sign = -1.0 if d > 0 else 1.0
            if t2 < tmax:
                tmax = t2
    if tmax < tmin or tmax < 1e-6 or tmin < 1e-6:
        return np.float64(-1.0), -1, 1.0
    return np.float64(tmin), axis, sign


@njit(nogil=True, cache=True)
def _lane_hit(hx, hy, lanes):
    """Index of the first lane marking containing ground point (hx, hy)."""
    for i in range(lanes.shape[0]):
        x1 = lanes[i, 0]
        y1 = lanes[i, 1]
        vx = lanes[i, 2] - x1
        vy = lanes[i, 3] - y1
        half = lanes[i, 4]
        px = hx - x1
        py = hy - y1
        vv = vx * vx + vy * vy
        f = 0.0
        if vv > 0.0:
            f = (px * vx + py * vy) / vv
            if f < 0.0:
                f = 0.0
            elif f > 1.0:
                f = 1.0
        ex = px - f * vx
        ey = py - f * vy
        if ex * ex + ey * ey <= half * half:
            return i
    return -1


@njit(parallel=True, nogil=True, cache=True)
def _trace(
    origin,
    fwd,
    left,
    up,
    tanh,
    tanv,
    spheres,
    sphere_class,
    sphere_albedo,
    boxes,
    box_class,
    box_albedo,
    lanes,
    lane_class,
    lane_albedo,
    ground_class,
    ground_albedo,
    light,
    want_rgb,
    rgb,
    class_out,
    depth_out,
):
    h, w = class_out.shape
    ox = origin[0]
    oy = origin[1]
    oz = origin[2]
    for r in prange(h):
        for c in range(w):
            u = (2.0 * (c + 0.5) / w - 1.0) * tanh
            v = (2.0 * (r + 0.5) / h - 1.0) * tanv
            dx = fwd[0] - u * left[0] - v * up[0]
            dy = fwd[1] - u * left[1] - v * up[1]
            dz = fwd[2] - u * left[2] - v * up[2]
            inv = 1.0 / math.sqrt(dx * dx + dy * dy + dz * dz)
            dx *= inv
            dy *= inv
            dz *= inv

            t_best = 1.0e30
            kind = -1  # -1 sky, 0 ground, 1 sphere, 2 box
            idx = -1
            if dz < -1e-12 and oz > 0.0:
                t_best = -oz / dz
                kind = 0
            for i in range(spheres.shape[0]):
                t = _sphere_t(ox, oy, oz, dx, dy, dz, spheres[i, 0], spheres[i, 1], spheres[i, 2], spheres[i, 3])
                if 0.0 < t < t_best:
                    t_best = t
                    kind = 1
                    idx = i
            axis_hit = -1
            sign_hit = 1.0
            for i in range(boxes.shape[0]):
                t, axis, sign = _box_t(
                    ox, oy, oz, dx, dy, dz,
                    boxes[i, 0], boxes[i, 1], boxes[i, 2],
                    boxes[i, 3], boxes[i, 4], boxes[i, 5],
                    boxes[i, 6], boxes[i, 7],
                )
                if 0.0 < t < t_best:
                    t_best = t
                    kind = 2
                    idx = i
                    axis_hit = axis
                    sign_hit = sign

            # depth
            if kind < 0:
                depth_out[r, c] = 255
                class_out[r, c] = 0
            else:
                d = t_best if t_best < DEPTH_MAX_M else DEPTH_MAX_M
                depth_out[r, c] = np.uint8(int(255.0 * d / DEPTH_MAX_M + 0.5))
                if kind == 0:
                    hxp = ox + t_best * dx
                    hyp = oy + t_best * dy
                    li = _lane_hit(hxp, hyp, lanes)
                    class_out[r, c] = lane_class[li] if li >= 0 else ground_class
                elif kind == 1:
                    class_out[r, c] = sphere_class[idx]
                else:
                    class_out[r, c] = box_class[idx]

            if want_rgb:
                if kind < 0:
                    rgb[r, c, 0] = 135
                    rgb[r, c, 1] = 206
                    rgb[r, c, 2] = 235
                    continue
                # surface normal
                if kind == 0:
                    nx = 0.0
                    ny = 0.0
                    nz = 1.0
                elif kind == 1:
                    px = ox + t_best * dx - spheres[idx, 0]
                    py = oy + t_best * dy - spheres[idx, 1]
                    pz = oz + t_best * dz - spheres[idx, 2]
                    inv = 1.0 / math.sqrt(px * px + py * py + pz * pz)
                    nx = px * inv
                    ny = py * inv
                    nz = pz * inv
                else:
                    cyaw = boxes[idx, 6]
                    syaw = boxes[idx, 7]
                    if axis_hit == 0:
                        nx = cyaw * sign_hit
                        ny = syaw * sign_hit
                        nz = 0.0
                    elif axis_hit == 1:
                        nx = -syaw * sign_hit
                        ny = cyaw * sign_hit
                        nz = 0.0
                    else:
                        nx = 0.0
                        ny = 0.0
                        nz = sign_hit
                lam = -(nx * light[0] + ny * light[1] + nz * light[2])
                if lam < 0.0:
                    lam = 0.0
                shade = AMBIENT + (1.0 - AMBIENT) * lam
                if kind == 0:
                    hxp = ox + t_best * dx
                    hyp = oy + t_best * dy
                    li = _lane_hit(hxp, hyp, lanes)
                    if li >= 0:
                        ar = lane_albedo[li, 0]
                        ag = lane_albedo[li, 1]
                        ab = lane_albedo[li, 2]
                    else:
                        ar = ground_albedo[0]
                        ag = ground_albedo[1]
                        ab = ground_albedo[2]
                elif kind == 1:
                    ar = sphere_albedo[idx, 0]
                    ag = sphere_albedo[idx, 1]
                    ab = sphere_albedo[idx, 2]
                else:
                    ar = box_albedo[idx, 0]
                    ag = box_albedo[idx, 1]
                    ab = box_albedo[idx, 2]
                rgb[r, c, 0] = np.uint8(int(ar * shade + 0.5))
                rgb[r, c, 1] = np.uint8(int(ag * shade + 0.5))
                rgb[r, c, 2] = np.uint8(int(ab * shade + 0.5))


def _camera_basis(camera: CameraConfig, pose: VehicleState):
    yaw = pose.heading_rad + math.radians(camera.mount.yaw_deg)
    pitch = math.radians(camera.mount.pitch_deg)
    ch, sh = math.cos(pose.heading_rad), math.sin(pose.heading_rad)
    origin = np.array(
        [
            pose.x + ch * camera.mount.x - sh * camera.mount.y,
            pose.y + sh * camera.mount.x + ch * camera.mount.y,
            camera.mount.z,
        ]
    )
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    fwd = np.array([cp * cy, cp * sy, sp])
    left = np.array([-sy, cy, 0.0])
    up = np.array([-sp * cy, -sp * sy, cp])
    tanh = math.tan(math.radians(camera.horizontal_fov_deg) / 2)
    tanv = tanh * camera.height / camera.width
    return origin, fwd, left, up, tanh, tanv


_LIGHT = np.array(LIGHT_DIR)


def render(
    scene: Scene | FlatScene,
    camera: CameraConfig,
    vehicle_pose: VehicleState,
    kind: str = "rgb",
) -> ImageBuffer:
    """Render one sensor frame: kind is "rgb", "semantic", or "depth"."""
    flat = scene if isinstance(scene, FlatScene) else flatten_scene(scene)
    origin, fwd, left, up, tanh, tanv = _camera_basis(camera, vehicle_pose)
    h, w = camera.height, camera.width
    want_rgb = kind == "rgb"
    rgb = np.empty((h, w, 3) if want_rgb else (1, 1, 3), np.uint8)
    class_out = np.empty((h, w), np.uint8)
    depth_out = np.empty((h, w), np.uint8)
    with KERNEL_LOCK:
        _trace(
            origin, fwd, left, up, tanh, tanv,
            flat.spheres, flat.sphere_class, flat.sphere_albedo,
            flat.boxes, flat.box_class, flat.box_albedo,
            flat.lanes, flat.lane_class, flat.lane_albedo,
            flat.ground_class, flat.ground_albedo,
            _LIGHT, want_rgb, rgb, class_out, depth_out,
        )
    if kind == "rgb":
        return ImageBuffer(PixelFormat.RGB, rgb)
    if kind == "semantic":
        return ImageBuffer(PixelFormat.CLASS_ID, class_out)
    if kind == "depth":
        return ImageBuffer(PixelFormat.DEPTH, depth_out)
    raise ValueError(f"unknown render kind {kind!r}")


def road_feature_filter(img: ImageBuffer) -> ImageBuffer:
    """Edge-emphasis mask: luma -> 3x3 Sobel magnitude -> binary threshold.

    Border pixels are always 0; output pixels are 0 or 255.
    """
    if img.pixel_format is not PixelFormat.RGB:
        raise ValueError(f"road filter expects RGB input, got {img.pixel_format.value}")
    h, w = img.height, img.width
    mask = np.zeros((h, w), np.uint8)
    if h >= 3 and w >= 3:
        y, _, _ = rgb_to_ycbcr_planes(img.data)
        a = y.astype(np.int32)
        gx = (
            (a[:-2, 2:] + 2 * a[1:-1, 2:] + a[2:, 2:])
            - (a[:-2, :-2] + 2 * a[1:-1, :-2] + a[2:, :-2])
        )
        gy = (
            (a[2:, :-2] + 2 * a[2:, 1:-1] + a[2:, 2:])
            - (a[:-2, :-2] + 2 * a[:-2, 1:-1] + a[:-2, 2:])
        )
        mag = np.sqrt(gx.astype(np.float64) ** 2 + gy.astype(np.float64) ** 2)
        mask[1:-1, 1:-1] = np.where(mag >= SOBEL_THRESHOLD, 255, 0).astype(np.uint8)
    return ImageBuffer(PixelFormat.GRAY, mask)
