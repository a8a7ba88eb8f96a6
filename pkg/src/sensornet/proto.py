"""Wire protocol: frame format, message schema, and streaming decode.

Frame layout (integers big-endian, reals IEEE-754 binary64 big-endian):

    ┌───────────┬─────┬──────┬─────────────┬───────────┬───────┐
    │ magic     │ ver │ type │ payload_len │  payload  │  crc  │
    │ A5 1E     │ u8  │ u8   │ u32         │  N bytes  │ u32   │
    └───────────┴─────┴──────┴─────────────┴───────────┴───────┘

crc is CRC-32/ISO-HDLC over ver ‖ type ‖ payload_len ‖ payload (magic
excluded).  payload_len is capped at 64 MiB.  Strings are encoded as a u16
byte length followed by UTF-8 bytes.  See PROTOCOL.md for hex dumps of every
message type.

All functions here are pure and safe to call from any thread.
"""

from __future__ import annotations

import enum
import math
import struct
import zlib
from dataclasses import dataclass

from .types import VehicleState

MAGIC = b"\xa5\x1e"
PROTO_VERSION = 1
MAX_PAYLOAD = 64 * 1024 * 1024
_HEADER = struct.Struct(">2sBBI")
_CRC = struct.Struct(">I")

STEERING_LIMIT_DEG = 45.0


class ProtoError(Exception):
    pass


class PayloadTooLarge(ProtoError):
    pass


class SensorKind(enum.IntEnum):
    RGB = 0
    SEMANTIC = 1
    DEPTH = 2
    ROAD_FEATURE = 3
    LIDAR = 4
    GPS = 5


class WireEncoding(enum.IntEnum):
    RAW = 0
    LOSSY = 1
    LOSSY_PLUS_DEFLATE = 2


@dataclass(frozen=True)
class Hello:
    proto_version: int = PROTO_VERSION


@dataclass(frozen=True)
class HelloAck:
    proto_version: int
    server_name: str


@dataclass(frozen=True)
class SetCommand:
    steering_deg: float
    throttle: float


@dataclass(frozen=True)
class CommandAck:
    pass


@dataclass(frozen=True)
class GetSensor:
    sensor_kind: SensorKind
    encoding: WireEncoding = WireEncoding.RAW
    quality: int = 75


@dataclass(frozen=True)
class SensorData:
    sensor_kind: SensorKind
    encoding: WireEncoding
    width: int
    height: int
    payload: bytes


@dataclass(frozen=True)
class GetVehicleState:
    pass


@dataclass(frozen=True)
class Ping:
    nonce: int


@dataclass(frozen=True)
class Pong:
    nonce: int


@dataclass(frozen=True)
class Error:
    code: int
    text: str


# VehicleState doubles as the state-response message; field order on the wire
# is x, y, heading_rad, speed_mps, steering_deg, sim_time_s.
Message = (
    Hello
    | HelloAck
    | SetCommand
    | CommandAck
    | GetSensor
    | SensorData
    | GetVehicleState
    | VehicleState
    | Ping
    | Pong
    | Error
)

# Well-known Error codes.
ERR_VERSION_MISMATCH = 0x0001
ERR_SERVER_FULL = 0x0002
ERR_HELLO_REQUIRED = 0x0003
ERR_BAD_SENSOR = 0x0004
ERR_ENCODE_FAILURE = 0x0005
ERR_UNEXPECTED_MESSAGE = 0x0006
ERR_SHUTDOWN = 0x00FF


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise ValueError("string too long for wire")
    return struct.pack(">H", len(raw)) + raw


def _unpack_str(buf: bytes, off: int) -> tuple[str, int]:
    (n,) = struct.unpack_from(">H", buf, off)
    end = off + 2 + n
    if end > len(buf):
        raise ValueError("truncated string")
    return buf[off + 2 : end].decode("utf-8"), end


def _check_range(name: str, value: float, lo: float, hi: float):
    if not (lo <= value <= hi):  # also rejects NaN
        raise ValueError(f"{name} {value!r} outside [{lo}, {hi}]")


def _enc_hello(m: Hello) -> bytes:
    return struct.pack(">B", m.proto_version)


def _dec_hello(buf: bytes) -> Hello:
    (v,) = struct.unpack(">B", buf)
    return Hello(v)


def _enc_hello_ack(m: HelloAck) -> bytes:
    return struct.pack(">B", m.proto_version) + _pack_str(m.server_name)


def _dec_hello_ack(buf: bytes) -> HelloAck:
    (v,) = struct.unpack_from(">B", buf, 0)
    name, end = _unpack_str(buf, 1)
    if end != len(buf):
        raise ValueError("trailing bytes")
    return HelloAck(v, name)


def _enc_set_command(m: SetCommand) -> bytes:
    _check_range("steering_deg", m.steering_deg, -STEERING_LIMIT_DEG, STEERING_LIMIT_DEG)
    _check_range("throttle", m.throttle, -1.0, 1.0)
    return struct.pack(">dd", m.steering_deg, m.throttle)


def _dec_set_command(buf: bytes) -> SetCommand:
    steering, throttle = struct.unpack(">dd", buf)
    _check_range("steering_deg", steering, -STEERING_LIMIT_DEG, STEERING_LIMIT_DEG)
    _check_range("throttle", throttle, -1.0, 1.0)
    return SetCommand(steering, throttle)


def _enc_get_sensor(m: GetSensor) -> bytes:
    if not 1 <= m.quality <= 100:
        raise ValueError(f"quality {m.quality} outside [1, 100]")
    return struct.pack(">BBB", SensorKind(m.sensor_kind), WireEncoding(m.encoding), m.quality)


def _dec_get_sensor(buf: bytes) -> GetSensor:
    kind, enc, quality = struct.unpack(">BBB", buf)
    if not 1 <= quality <= 100:
        raise ValueError(f"quality {quality} outside [1, 100]")
    return GetSensor(SensorKind(kind), WireEncoding(enc), quality)


def _enc_sensor_data(m: SensorData) -> bytes:
    return (
        struct.pack(">BBII", SensorKind(m.sensor_kind), WireEncoding(m.encoding), m.width, m.height)
        + m.payload
    )


def _dec_sensor_data(buf: bytes) -> SensorData:
    kind, enc, w, h = struct.unpack_from(">BBII", buf, 0)
    return SensorData(SensorKind(kind), WireEncoding(enc), w, h, bytes(buf[10:]))


def _enc_vehicle_state(m: VehicleState) -> bytes:
    for f in (m.x, m.y, m.heading_rad, m.speed_mps, m.steering_deg, m.sim_time_s):
        if not math.isfinite(f):
            raise ValueError("non-finite vehicle state field")
    return struct.pack(">6d", m.x, m.y, m.heading_rad, m.speed_mps, m.steering_deg, m.sim_time_s)


def _dec_vehicle_state(buf: bytes) -> VehicleState:
    return VehicleState(*struct.unpack(">6d", buf))


def _enc_nonce(m) -> bytes:
    if not 0 <= m.nonce <= 0xFFFFFFFFFFFFFFFF:
        raise ValueError("nonce outside u64")
    return struct.pack(">Q", m.nonce)


def _enc_error(m: Error) -> bytes:
    if not 0 <= m.code <= 0xFFFF:
        raise ValueError("error code outside u16")
    return struct.pack(">H", m.code) + _pack_str(m.text)


def _dec_error(buf: bytes) -> Error:
    (code,) = struct.unpack_from(">H", buf, 0)
    text, end = _unpack_str(buf, 2)
    if end != len(buf):
        raise ValueError("trailing bytes")
    return Error(code, text)


def _dec_empty(cls):
    def dec(buf: bytes):
        if buf:
            raise ValueError("expected empty payload")
        return cls()

    return dec


_CODECS = {
    Hello: (0x01, _enc_hello, _dec_hello),
    HelloAck: (0x02, _enc_hello_ack, _dec_hello_ack),
    SetCommand: (0x10, _enc_set_command, _dec_set_command),
    CommandAck: (0x11, lambda m: b"", _dec_empty(CommandAck)),
    GetSensor: (0x20, _enc_get_sensor, _dec_get_sensor),
    SensorData: (0x21, _enc_sensor_data, _dec_sensor_data),
    GetVehicleState: (0x30, lambda m: b"", _dec_empty(GetVehicleState)),
    VehicleState: (0x31, _enc_vehicle_state, _dec_vehicle_state),
    Ping: (0x40, _enc_nonce, lambda b: Ping(*struct.unpack(">Q", b))),
    Pong: (0x41, _enc_nonce, lambda b: Pong(*struct.unpack(">Q", b))),
    Error: (0x7F, _enc_error, _dec_error),
}

_DECODERS = {code: dec for code, _, dec in _CODECS.values()}
_TYPE_NAMES = {code: cls.__name__ for cls, (code, _, _) in _CODECS.items()}


def message_type_code(msg: Message) -> int:
    """Schema-assigned msg_type byte for a message; total over all variants."""
    try:
        return _CODECS[type(msg)][0]
    except KeyError:
        raise ProtoError(f"not a protocol message: {type(msg).__name__}") from None


def encode_frame(msg: Message) -> bytes:
    """Serialize one message into a complete wire frame."""
    code, enc, _ = _CODECS[type(msg)]
    payload = enc(msg)
    if len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload {len(payload)} exceeds {MAX_PAYLOAD} bytes")
    body = struct.pack(">BBI", PROTO_VERSION, code, len(payload)) + payload
    return MAGIC + body + _CRC.pack(zlib.crc32(body))


@dataclass(frozen=True)
class NeedMoreData:
    pass


@dataclass(frozen=True)
class Decoded:
    message: Message
    consumed: int


@dataclass(frozen=True)
class CorruptFrame:
    reason: str


DecodeResult = NeedMoreData | Decoded | CorruptFrame


def decode_stream(buffer: bytes | bytearray | memoryview) -> DecodeResult:
    """Try to decode exactly one frame from the head of ``buffer``.

    Returns NeedMoreData when no complete frame is present, Decoded with the
    number of bytes consumed, or CorruptFrame — after which the caller must
    close the connection.
    """
    buf = bytes(buffer)
    if len(buf) >= 1 and buf[0] != MAGIC[0]:
        return CorruptFrame("bad_magic")
    if len(buf) >= 2 and buf[1] != MAGIC[1]:
        return CorruptFrame("bad_magic")
    if len(buf) < _HEADER.size:
        return NeedMoreData()
    _, version, msg_type, payload_len = _HEADER.unpack_from(buf, 0)
    if payload_len > MAX_PAYLOAD:
        return CorruptFrame("payload_too_large")
    total = _HEADER.size + payload_len + _CRC.size
    if len(buf) < total:
        return NeedMoreData()
    body = buf[2 : _HEADER.size + payload_len]
    (crc,) = _CRC.unpack_from(buf, _HEADER.size + payload_len)
    if zlib.crc32(body) != crc:
        return CorruptFrame("bad_crc")
    if version != PROTO_VERSION:
        return CorruptFrame("bad_version")
    dec = _DECODERS.get(msg_type)
    if dec is None:
        return CorruptFrame("unknown_msg_type")
    try:
        msg = dec(buf[_HEADER.size : _HEADER.size + payload_len])
    except (struct.error, ValueError, UnicodeDecodeError):
        return CorruptFrame("bad_payload")
    return Decoded(msg, total)
