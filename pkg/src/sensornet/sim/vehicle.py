"""Kinematic bicycle model for the simulated vehicle."""

from __future__ import annotations

import math
from typing import NamedTuple

from ..types import VehicleState

WHEELBASE_M = 2.5
MAX_ACCEL_MPS2 = 3.0
MAX_SPEED_MPS = 20.0
STEERING_LIMIT_DEG = 45.0


class DriveCommand(NamedTuple):
    steering_deg: float = 0.0
    throttle: float = 0.0


def clamp_steering(steering_deg: float) -> float:
    return min(STEERING_LIMIT_DEG, max(-STEERING_LIMIT_DEG, steering_deg))


def step(state: VehicleState, cmd: DriveCommand, dt: float) -> VehicleState:
    """One kinematic update.

    speed' = clamp(speed + throttle * a_max * dt, 0, v_max)
    heading' = heading + (speed' / L) * tan(steering) * dt
    position advances along the *new* heading with the *new* speed.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    steering = clamp_steering(cmd.steering_deg)
    speed = state.speed_mps + cmd.throttle * MAX_ACCEL_MPS2 * dt
    speed = min(MAX_SPEED_MPS, max(0.0, speed))
    heading = state.heading_rad + (speed / WHEELBASE_M) * math.tan(math.radians(steering)) * dt
    return VehicleState(
        x=state.x + speed * math.cos(heading) * dt,
        y=state.y + speed * math.sin(heading) * dt,
        heading_rad=heading,
        speed_mps=speed,
        steering_deg=steering,
        sim_time_s=state.sim_time_s + dt,
    )
