"""Simulator wire formats carried between nodes.

* Inner user-plane packet: ``src_ip(4) || dst_ip(4) || len(2) || payload``.
* Inside the payload, a port header ``src_port(2) || dst_port(2)`` demultiplexes
  endpoints on a UE (the TLS server listens on 4433).
* Control messages use ``type(1) || len(3) || body`` with a UTF-8 JSON body.
"""

from __future__ import annotations

import enum
import ipaddress
import json
import struct
from dataclasses import dataclass

from ..errors import FramingError
from ..framing import frame, unframe

INNER_HEADER = 10
PORT_HEADER = 4


@dataclass(frozen=True)
class InnerPacket:
    src: ipaddress.IPv4Address
    dst: ipaddress.IPv4Address
    payload: bytes

    def encode(self) -> bytes:
        if len(self.payload) > 0xFFFF:
            raise FramingError("inner payload exceeds 16-bit length")
        return self.src.packed + self.dst.packed + struct.pack(">H", len(self.payload)) + self.payload

    @classmethod
    def decode(cls, data: bytes) -> "InnerPacket":
        if len(data) < INNER_HEADER:
            raise FramingError("inner packet shorter than its 10-byte header")
        (length,) = struct.unpack_from(">H", data, 8)
        if length != len(data) - INNER_HEADER:
            raise FramingError(f"inner length field {length} but {len(data) - INNER_HEADER} bytes follow")
        return cls(ipaddress.IPv4Address(data[:4]), ipaddress.IPv4Address(data[4:8]), data[INNER_HEADER:])


def port_wrap(src_port: int, dst_port: int, data: bytes) -> bytes:
    return struct.pack(">HH", src_port, dst_port) + data


def port_unwrap(payload: bytes) -> tuple[int, int, bytes]:
    if len(payload) < PORT_HEADER:
        raise FramingError("payload shorter than the port header")
    src, dst = struct.unpack_from(">HH", payload)
    return src, dst, payload[PORT_HEADER:]


class Msg(enum.IntEnum):
    REGISTRATION_REQUEST = 0x41
    AUTH_CHALLENGE = 0x42
    AUTH_RESPONSE = 0x43
    REGISTRATION_ACCEPT = 0x44
    REGISTRATION_REJECT = 0x45
    PDU_SESSION_REQUEST = 0x46
    PDU_SESSION_ACCEPT = 0x47
    PDU_SESSION_REJECT = 0x48
    N11_CREATE_SESSION = 0x49
    N4_SESSION_ESTABLISH = 0x50
    N4_SESSION_ACK = 0x51
    N4_ROUTE_ADD = 0x52
    USER_DATA = 0x70


def control(msg: Msg, **fields) -> bytes:
    return frame(msg, json.dumps(fields, sort_keys=True, separators=(",", ":")).encode())


def parse_control(data: bytes) -> tuple[Msg, dict | bytes]:
    """USER_DATA bodies come back as raw bytes, everything else as a dict."""
    msg_type, body = unframe(data)
    try:
        msg = Msg(msg_type)
    except ValueError:
        raise FramingError(f"unknown control message type 0x{msg_type:02x}") from None
    if msg is Msg.USER_DATA:
        return msg, body
    try:
        fields = json.loads(body)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FramingError(f"malformed control body: {exc}") from None
    if not isinstance(fields, dict):
        raise FramingError("control body must be a JSON object")
    return msg, fields


def user_data(inner: bytes) -> bytes:
    return frame(Msg.USER_DATA, inner)
