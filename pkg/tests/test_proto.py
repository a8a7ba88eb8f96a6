import struct
import zlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sensornet import proto
from sensornet.proto import (
    CommandAck,
    CorruptFrame,
    Decoded,
    Error,
    GetSensor,
    GetVehicleState,
    Hello,
    HelloAck,
    NeedMoreData,
    PayloadTooLarge,
    Ping,
    Pong,
    SensorKind,
    SetCommand,
    SensorData,
    WireEncoding,
    decode_stream,
    encode_frame,
    message_type_code,
)
from sensornet.types import VehicleState


def crc32_reference(data: bytes) -> int:
    """Bitwise CRC-32/ISO-HDLC, independent of zlib."""
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            crc = (crc >> 1) ^ 0xEDB88320 if crc & 1 else crc >> 1
    return crc ^ 0xFFFFFFFF


# frozen from the pre-build reference CRC run (also = zlib.crc32)
GOLDEN_PING_FRAME = bytes.fromhex("a51e01400000000800000000000000004ae1ab02")


def test_reference_crc_check_vector():
    assert crc32_reference(b"123456789") == 0xCBF43926


def test_golden_ping_frame():
    frame = encode_frame(Ping(nonce=0))
    assert frame == GOLDEN_PING_FRAME
    body = frame[2:-4]
    assert struct.unpack(">I", frame[-4:])[0] == crc32_reference(body) == zlib.crc32(body)


def test_type_codes():
    expect = {
        Hello(): 0x01,
        HelloAck(1, "s"): 0x02,
        SetCommand(0.0, 0.0): 0x10,
        CommandAck(): 0x11,
        GetSensor(SensorKind.RGB, WireEncoding.RAW, 75): 0x20,
        SensorData(SensorKind.RGB, WireEncoding.RAW, 1, 1, b"abc"): 0x21,
        GetVehicleState(): 0x30,
        VehicleState(): 0x31,
        Ping(1): 0x40,
        Pong(1): 0x41,
        Error(2, "boom"): 0x7F,
    }
    for msg, code in expect.items():
        assert message_type_code(msg) == code
        frame = encode_frame(msg)
        assert frame[:2] == proto.MAGIC
        assert frame[3] == code


def test_message_type_code_rejects_non_message():
    with pytest.raises(proto.ProtoError):
        message_type_code("not a message")


def test_hello_frame_type_byte():
    assert encode_frame(Hello(proto_version=1))[3] == 0x01


def test_set_command_roundtrip_zero():
    frame = encode_frame(SetCommand(0.0, 0.0))
    res = decode_stream(frame)
    assert isinstance(res, Decoded)
    assert res.message == SetCommand(0.0, 0.0)
    assert res.consumed == len(frame)


ALL_MESSAGES = [
    Hello(1),
    HelloAck(1, "sensornet"),
    SetCommand(-45.0, 1.0),
    SetCommand(12.5, -0.25),
    CommandAck(),
    GetSensor(SensorKind.LIDAR, WireEncoding.RAW, 1),
    GetSensor(SensorKind.RGB, WireEncoding.LOSSY_PLUS_DEFLATE, 100),
    SensorData(SensorKind.GPS, WireEncoding.RAW, 0, 0, b"\x00" * 32),
    SensorData(SensorKind.DEPTH, WireEncoding.LOSSY, 64, 48, bytes(range(256))),
    GetVehicleState(),
    VehicleState(1.5, -2.5, 0.75, 3.0, -10.0, 123.456),
    Ping(0),
    Ping(0xFFFFFFFFFFFFFFFF),
    Pong(7),
    Error(0x00FF, "shutdown"),
    Error(1, "версия"),  # non-ascii text survives
]


@pytest.mark.parametrize("msg", ALL_MESSAGES, ids=lambda m: type(m).__name__)
def test_roundtrip_each_variant(msg):
    frame = encode_frame(msg)
    res = decode_stream(frame)
    assert isinstance(res, Decoded)
    assert res.message == msg
    assert res.consumed == len(frame)


def test_empty_buffer_needs_more():
    assert decode_stream(b"") == NeedMoreData()


def test_all_split_points():
    frame = encode_frame(Ping(nonce=0x1122334455667788))
    for split in range(len(frame) + 1):
        head, tail = frame[:split], frame[split:]
        first = decode_stream(head)
        if split < len(frame):
            assert first == NeedMoreData(), f"split={split}"
        res = decode_stream(head + tail)
        assert isinstance(res, Decoded)
        assert res.message == Ping(nonce=0x1122334455667788)
        assert res.consumed == len(frame)


def test_crc_bit_flip_detected():
    frame = bytearray(encode_frame(Ping(nonce=5)))
    frame[-1] ^= 0x01
    assert decode_stream(bytes(frame)) == CorruptFrame("bad_crc")


def test_bad_magic():
    frame = bytearray(encode_frame(Ping(nonce=5)))
    frame[0] = 0x00
    assert decode_stream(bytes(frame)) == CorruptFrame("bad_magic")
    frame = bytearray(encode_frame(Ping(nonce=5)))
    frame[1] ^= 0xFF
    assert decode_stream(bytes(frame)) == CorruptFrame("bad_magic")


def test_unknown_msg_type():
    payload = b""
    body = struct.pack(">BBI", proto.PROTO_VERSION, 0x5A, 0) + payload
    frame = proto.MAGIC + body + struct.pack(">I", zlib.crc32(body))
    assert decode_stream(frame) == CorruptFrame("unknown_msg_type")


def test_bad_version_byte():
    body = struct.pack(">BBI", 2, 0x40, 8) + b"\x00" * 8
    frame = proto.MAGIC + body + struct.pack(">I", zlib.crc32(body))
    assert decode_stream(frame) == CorruptFrame("bad_version")


def test_oversize_payload_rejected_both_ways():
    with pytest.raises(PayloadTooLarge):
        encode_frame(SensorData(SensorKind.RGB, WireEncoding.RAW, 1, 1, b"x" * (proto.MAX_PAYLOAD + 1)))
    body = struct.pack(">BBI", proto.PROTO_VERSION, 0x21, proto.MAX_PAYLOAD + 1)
    frame = proto.MAGIC + body + struct.pack(">I", zlib.crc32(body))
    assert decode_stream(frame) == CorruptFrame("payload_too_large")


def test_bad_payload_schema():
    # Ping payload must be exactly 8 bytes
    payload = b"\x00" * 7
    body = struct.pack(">BBI", proto.PROTO_VERSION, 0x40, len(payload)) + payload
    frame = proto.MAGIC + body + struct.pack(">I", zlib.crc32(body))
    assert decode_stream(frame) == CorruptFrame("bad_payload")


def test_out_of_range_fields_rejected():
    with pytest.raises(ValueError):
        encode_frame(SetCommand(90.0, 0.0))
    with pytest.raises(ValueError):
        encode_frame(SetCommand(0.0, 1.5))
    with pytest.raises(ValueError):
        encode_frame(GetSensor(SensorKind.RGB, WireEncoding.RAW, 0))
    with pytest.raises(ValueError):
        encode_frame(GetSensor(SensorKind.RGB, WireEncoding.RAW, 101))


def drain(buffer: bytes):
    """Decode every complete frame at the head of buffer."""
    out = []
    view = buffer
    while True:
        res = decode_stream(view)
        if isinstance(res, Decoded):
            out.append(res.message)
            view = view[res.consumed :]
        else:
            return out, view, res


def test_fragmentation_independence():
    msgs = [Ping(i) for i in range(5)] + [Error(9, "x" * 50), HelloAck(1, "srv")]
    stream = b"".join(encode_frame(m) for m in msgs)
    for chunk in (1, 2, 3, 7, 16, 64, len(stream)):
        got = []
        buf = b""
        for i in range(0, len(stream), chunk):
            buf += stream[i : i + chunk]
            decoded, buf, last = drain(buf)
            got.extend(decoded)
        assert got == msgs
        assert buf == b""


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)

message_strategy = st.one_of(
    st.builds(Hello, st.integers(0, 255)),
    st.builds(HelloAck, st.integers(0, 255), st.text(max_size=60)),
    st.builds(SetCommand, st.floats(-45, 45), st.floats(-1, 1)),
    st.just(CommandAck()),
    st.builds(
        GetSensor,
        st.sampled_from(list(SensorKind)),
        st.sampled_from(list(WireEncoding)),
        st.integers(1, 100),
    ),
    st.builds(
        SensorData,
        st.sampled_from(list(SensorKind)),
        st.sampled_from(list(WireEncoding)),
        st.integers(0, 0xFFFFFFFF),
        st.integers(0, 0xFFFFFFFF),
        st.binary(max_size=2048),
    ),
    st.just(GetVehicleState()),
    st.builds(VehicleState, finite, finite, finite, finite, finite, finite),
    st.builds(Ping, st.integers(0, 2**64 - 1)),
    st.builds(Pong, st.integers(0, 2**64 - 1)),
    st.builds(Error, st.integers(0, 0xFFFF), st.text(max_size=120)),
)


@settings(max_examples=400, deadline=None)
@given(message_strategy)
def test_roundtrip_property(msg):
    frame = encode_frame(msg)
    res = decode_stream(frame)
    assert isinstance(res, Decoded)
    assert res.message == msg
    assert res.consumed == len(frame)


@settings(max_examples=200, deadline=None)
@given(message_strategy, st.data())
def test_single_byte_corruption_never_decodes(msg, data):
    frame = bytearray(encode_frame(msg))
    pos = data.draw(st.integers(0, len(frame) - 1))
    flip = data.draw(st.integers(1, 255))
    frame[pos] ^= flip
    res = decode_stream(bytes(frame))
    # corruption must never yield a successfully decoded message
    assert not isinstance(res, Decoded)
