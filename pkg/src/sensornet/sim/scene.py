"""Scene description: primitives, ground, lane markings, waypoint traffic.

Scenes load from a JSON document (see SCENE.md) and are flattened into plain
arrays for the raycast kernels.  class_id 0 is reserved for "void" (sky /
no hit) and may not be assigned to scene objects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


class SceneError(ValueError):
    pass


@dataclass
class Ground:
    class_id: int = 1
    albedo: tuple[int, int, int] = (95, 95, 100)


@dataclass
class Primitive:
    shape: str  # "box" | "sphere"
    position: tuple[float, float, float]
    class_id: int
    albedo: tuple[int, int, int]
    dimensions: tuple[float, float, float] = (1.0, 1.0, 1.0)  # box full extents
    radius: float = 1.0  # spheres
    yaw_deg: float = 0.0

    def validate(self):
        if self.shape not in ("box", "sphere"):
            raise SceneError(f"unknown shape {self.shape!r}")
        if self.class_id == 0:
            raise SceneError("class_id 0 is reserved for void")
        if self.shape == "box" and min(self.dimensions) <= 0:
            raise SceneError("box dimensions must be positive")
        if self.shape == "sphere" and self.radius <= 0:
            raise SceneError("sphere radius must be positive")


@dataclass
class LaneMarking:
    start: tuple[float, float]
    end: tuple[float, float]
    class_id: int
    width: float = 0.15
    albedo: tuple[int, int, int] = (235, 235, 235)

    def validate(self):
        if self.class_id == 0:
            raise SceneError("class_id 0 is reserved for void")
        if self.width <= 0:
            raise SceneError("lane width must be positive")


@dataclass
class NpcVehicle:
    waypoints: list[tuple[float, float]]
    speed_mps: float
    class_id: int
    dimensions: tuple[float, float, float] = (4.2, 1.8, 1.5)
    albedo: tuple[int, int, int] = (200, 170, 40)
    progress_m: float = 0.0  # arc position along the closed waypoint loop

    def __post_init__(self):
        if len(self.waypoints) < 1:
            raise SceneError("npc needs at least one waypoint")
        if self.class_id == 0:
            raise SceneError("class_id 0 is reserved for void")
        if min(self.dimensions) <= 0:
            raise SceneError("npc dimensions must be positive")
        if self.speed_mps < 0:
            raise SceneError("npc speed must be non-negative")
        pts = [np.asarray(p, float) for p in self.waypoints]
        segs = [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
        self._seg_len = [float(np.hypot(*(b - a))) for a, b in segs]
        self._total = sum(self._seg_len)

    @property
    def loop_length_m(self) -> float:
        return self._total

    def pose(self) -> tuple[float, float, float]:
        """(x, y, yaw_rad) at the current arc position of the loop."""
        pts = self.waypoints
        if self._total == 0.0:
            return pts[0][0], pts[0][1], 0.0
        s = self.progress_m % self._total
        for i, seg_len in enumerate(self._seg_len):
            if s <= seg_len and seg_len > 0:
                a = np.asarray(pts[i], float)
                b = np.asarray(pts[(i + 1) % len(pts)], float)
                f = s / seg_len
                p = a + (b - a) * f
                yaw = math.atan2(b[1] - a[1], b[0] - a[0])
                return float(p[0]), float(p[1]), yaw
            s -= seg_len
        a = np.asarray(pts[0], float)
        return float(a[0]), float(a[1]), 0.0


@dataclass
class Scene:
    ground: Ground = field(default_factory=Ground)
    primitives: list[Primitive] = field(default_factory=list)
    lane_markings: list[LaneMarking] = field(default_factory=list)
    npc_vehicles: list[NpcVehicle] = field(default_factory=list)

    def validate(self):
        if self.ground.class_id == 0:
            raise SceneError("ground class_id 0 is reserved for void")
        for p in self.primitives:
            p.validate()
        for m in self.lane_markings:
            m.validate()


def tick_world(scene: Scene, dt: float) -> Scene:
    """Advance each NPC along its waypoint polyline, looping at the end."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    for npc in scene.npc_vehicles:
        if npc.loop_length_m > 0:
            npc.progress_m = (npc.progress_m + npc.speed_mps * dt) % npc.loop_length_m
    return scene


@dataclass(frozen=True)
class FlatScene:
    """Numeric snapshot of scene geometry consumed by the raycast kernels.

    NPC vehicles appear as yawed boxes at their instantaneous pose, so a
    FlatScene is immutable with respect to later tick_world calls.
    """

    spheres: np.ndarray  # (ns, 4) cx cy cz radius, float32
    sphere_class: np.ndarray
    sphere_albedo: np.ndarray
    boxes: np.ndarray  # (nb, 8) cx cy cz hx hy hz cos_yaw sin_yaw, float32
    box_class: np.ndarray
    box_albedo: np.ndarray
    lanes: np.ndarray  # (nl, 5) x1 y1 x2 y2 half_width, float32
    lane_class: np.ndarray
    lane_albedo: np.ndarray
    ground_class: int
    ground_albedo: np.ndarray


def flatten_scene(scene: Scene) -> FlatScene:
    spheres, s_cls, s_alb = [], [], []
    boxes, b_cls, b_alb = [], [], []
    for p in scene.primitives:
        if p.shape == "sphere":
            spheres.append([*p.position, p.radius])
            s_cls.append(p.class_id)
            s_alb.append(p.albedo)
        else:
            yaw = math.radians(p.yaw_deg)
            boxes.append(
                [
                    *p.position,
                    p.dimensions[0] / 2,
                    p.dimensions[1] / 2,
                    p.dimensions[2] / 2,
                    math.cos(yaw),
                    math.sin(yaw),
                ]
            )
            b_cls.append(p.class_id)
            b_alb.append(p.albedo)
    for npc in scene.npc_vehicles:
        x, y, yaw = npc.pose()
        dx, dy, dz = npc.dimensions
        boxes.append([x, y, dz / 2, dx / 2, dy / 2, dz / 2, math.cos(yaw), math.sin(yaw)])
        b_cls.append(npc.class_id)
        b_alb.append(npc.albedo)
    lanes, l_cls, l_alb = [], [], []
    for m in scene.lane_markings:
        lanes.append([*m.start, *m.end, m.width / 2])
        l_cls.append(m.class_id)
        l_alb.append(m.albedo)

    def arr(data, ncol, dtype):
        return np.asarray(data, dtype).reshape(-1, ncol) if data else np.zeros((0, ncol), dtype)

    def vec(data, dtype=np.uint8):
        return np.asarray(data, dtype) if data else np.zeros(0, dtype)

    return FlatScene(
        spheres=arr(spheres, 4, np.float32),
        sphere_class=vec(s_cls),
        sphere_albedo=arr(s_alb, 3, np.uint8),
        boxes=arr(boxes, 8, np.float32),
        box_class=vec(b_cls),
        box_albedo=arr(b_alb, 3, np.uint8),
        lanes=arr(lanes, 5, np.float32),
        lane_class=vec(l_cls),
        lane_albedo=arr(l_alb, 3, np.uint8),
        ground_class=scene.ground.class_id,
        ground_albedo=np.asarray(scene.ground.albedo, np.uint8),
    )


def scene_from_dict(doc: dict) -> Scene:
    try:
        ground = Ground(**doc.get("ground", {}))
        prims = []
        for p in doc.get("primitives", []):
            p = dict(p)
            p["position"] = tuple(p["position"])
            if "dimensions" in p:
                p["dimensions"] = tuple(p["dimensions"])
            if "albedo" in p:
                p["albedo"] = tuple(p["albedo"])
            prims.append(Primitive(**p))
        lanes = []
        for m in doc.get("lane_markings", []):
            m = dict(m)
            m["start"] = tuple(m["start"])
            m["end"] = tuple(m["end"])
            if "albedo" in m:
                m["albedo"] = tuple(m["albedo"])
            lanes.append(LaneMarking(**m))
        npcs = []
        for n in doc.get("npc_vehicles", []):
            n = dict(n)
            n["waypoints"] = [tuple(w) for w in n["waypoints"]]
            if "dimensions" in n:
                n["dimensions"] = tuple(n["dimensions"])
            if "albedo" in n:
                n["albedo"] = tuple(n["albedo"])
            npcs.append(NpcVehicle(**n))
    except (KeyError, TypeError) as e:
        raise SceneError(f"bad scene document: {e}") from None
    scene = Scene(ground=ground, primitives=prims, lane_markings=lanes, npc_vehicles=npcs)
    scene.validate()
    return scene


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise SceneError(f"scene file is not valid JSON: {e}") from None
    return scene_from_dict(doc)
