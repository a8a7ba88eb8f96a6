"""GPS fixes from vehicle state via a local-tangent-plane inverse projection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..types import GeoFix, VehicleState

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GpsOrigin:
    lat0_deg: float = 0.0
    lon0_deg: float = 0.0

    def validate(self):
        if abs(self.lat0_deg) >= 89.0:
            raise ValueError("origin latitude must satisfy |lat0| < 89 degrees")
        if abs(self.lon0_deg) > 180.0:
            raise ValueError("origin longitude must be within [-180, 180]")


def gps_fix(
    state: VehicleState,
    origin: GpsOrigin,
    noise_sigma_m: float = 0.0,
    rng_seed: int = 0,
) -> GeoFix:
    """Seeded, deterministic fix: same (state, origin, sigma, seed) in, same fix out."""
    origin.validate()
    rng = np.random.default_rng(rng_seed)
    n_x, n_y = rng.standard_normal(2) * noise_sigma_m
    deg_per_m = 180.0 / (math.pi * EARTH_RADIUS_M)
    lat = origin.lat0_deg + (state.y + n_y) * deg_per_m
    lon = origin.lon0_deg + (state.x + n_x) * deg_per_m / math.cos(math.radians(origin.lat0_deg))
    heading = math.degrees(state.heading_rad) % 360.0
    return GeoFix(
        latitude_deg=min(90.0, max(-90.0, lat)),
        longitude_deg=min(180.0, max(-180.0, lon)),
        speed_mps=state.speed_mps,
        heading_deg=heading,
    )
