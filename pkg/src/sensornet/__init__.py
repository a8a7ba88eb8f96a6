"""sensornet: binary TCP sensor streaming for a simulated vehicle.

Subpackages and modules:

- ``proto``      wire framing and message schema
- ``colorspace`` BT.601 RGB/YCbCr conversion
- ``codec``      lossy JPEG coding, YCbCr packing, gzip, size reports
- ``sim``        kinematic vehicle, raycast cameras, LIDAR, GPS, traffic
- ``server``     TCP sensor server
- ``client``     blocking request/response client SDK
- ``bench``      compression and throughput benchmark CLI
"""

from .types import GeoFix, ImageBuffer, PixelFormat, PointCloud, VehicleState

__all__ = ["GeoFix", "ImageBuffer", "PixelFormat", "PointCloud", "VehicleState"]

__version__ = "0.1.0"
