"""GTP-U G-PDU framing: 8-byte header, no optional fields or extension headers."""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..errors import FramingError

HEADER_LEN = 8
FLAGS = 0x30  # version 1, PT=1, E=S=PN=0
G_PDU = 0xFF
GTPU_PORT = 2152
MAX_PAYLOAD = 0xFFFF


@dataclass(frozen=True)
class GtpuHeader:
    teid: int
    length: int
    flags: int = FLAGS
    msg_type: int = G_PDU

    @property
    def version(self) -> int:
        return self.flags >> 5

    def pack(self) -> bytes:
        return struct.pack(">BBHI", self.flags, self.msg_type, self.length, self.teid)

    @classmethod
    def unpack(cls, data: bytes) -> "GtpuHeader":
        if len(data) < HEADER_LEN:
            raise FramingError(f"GTP-U frame of {len(data)} bytes is shorter than the header")
        flags, msg_type, length, teid = struct.unpack_from(">BBHI", data)
        return cls(teid, length, flags, msg_type)


def gtpu_encap(teid: int, inner: bytes) -> bytes:
    if not 0 <= teid <= 0xFFFFFFFF:
        raise FramingError(f"TEID {teid} does not fit 32 bits")
    if len(inner) > MAX_PAYLOAD:
        raise FramingError(f"GTP-U payload of {len(inner)} bytes exceeds the 16-bit length")
    return GtpuHeader(teid, len(inner)).pack() + inner


def gtpu_decap(frame: bytes) -> tuple[int, bytes]:
    hdr = GtpuHeader.unpack(frame)
    if hdr.version != 1:
        raise FramingError(f"GTP version {hdr.version}, expected 1")
    if hdr.flags != FLAGS:
        raise FramingError(f"unsupported GTP-U flags 0x{hdr.flags:02x}")
    if hdr.msg_type != G_PDU:
        raise FramingError(f"GTP-U message type 0x{hdr.msg_type:02x} is not a G-PDU")
    if hdr.length != len(frame) - HEADER_LEN:
        raise FramingError(f"GTP-U length field {hdr.length} but {len(frame) - HEADER_LEN} payload bytes")
    return hdr.teid, frame[HEADER_LEN:]
