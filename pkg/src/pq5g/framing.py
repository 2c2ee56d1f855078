"""``type(1) || length(3, big-endian) || body`` framing shared by handshake and control messages."""

from __future__ import annotations

import struct

from .errors import FramingError

MAX_BODY = 2**24 - 1


def frame(msg_type: int, body: bytes) -> bytes:
    if not 0 <= msg_type <= 0xFF:
        raise FramingError(f"message type {msg_type} does not fit one byte")
    if len(body) > MAX_BODY:
        raise FramingError("message body too long for a 3-byte length")
    return bytes([msg_type]) + len(body).to_bytes(3, "big") + body


def unframe(data: bytes) -> tuple[int, bytes]:
    """Parse exactly one frame; trailing bytes are an error."""
    if len(data) < 4:
        raise FramingError("frame shorter than its 4-byte header")
    length = int.from_bytes(data[1:4], "big")
    if len(data) != 4 + length:
        raise FramingError(f"frame length field {length} does not match {len(data) - 4} body bytes")
    return data[0], data[4:]


class Reader:
    """Strict cursor over a message body."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise FramingError(f"need {n} bytes at offset {self.pos}, only {len(self.data) - self.pos} left")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self.take(8))[0]

    def vec8(self) -> bytes:
        return self.take(self.u8())

    def vec16(self) -> bytes:
        return self.take(self.u16())

    def rest(self) -> bytes:
        return self.take(len(self.data) - self.pos)

    def done(self) -> None:
        if self.pos != len(self.data):
            raise FramingError(f"{len(self.data) - self.pos} trailing bytes")


def vec8(data: bytes) -> bytes:
    if len(data) > 0xFF:
        raise FramingError("vector too long for 1-byte length")
    return bytes([len(data)]) + data


def vec16(data: bytes) -> bytes:
    if len(data) > 0xFFFF:
        raise FramingError("vector too long for 2-byte length")
    return struct.pack(">H", len(data)) + data
