"""AES-128-GCM record protection and record framing."""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from ..errors import FramingError, RecordError
from .schedule import expand_label

KEY_LEN = 16
IV_LEN = 12
TAG_LEN = 16
SEQ_LIMIT = 2**64 - 1
MAX_RECORD = 2**16 - 1
HEADER_LEN = 3


class ContentType(enum.IntEnum):
    ALERT = 21
    HANDSHAKE = 22
    APPLICATION_DATA = 23


@dataclass
class RecordKeys:
    aead_key: bytes
    iv: bytes
    seq: int = 0

    @classmethod
    def from_secret(cls, traffic_secret: bytes) -> "RecordKeys":
        return cls(
            expand_label(traffic_secret, "key", b"", KEY_LEN),
            expand_label(traffic_secret, "iv", b"", IV_LEN),
        )

    def nonce(self) -> bytes:
        padded = self.seq.to_bytes(IV_LEN, "big")
        return bytes(a ^ b for a, b in zip(self.iv, padded))


def _next_nonce(keys: RecordKeys) -> bytes:
    if keys.seq >= SEQ_LIMIT:
        raise RecordError("record sequence number exhausted")
    return keys.nonce()


def record_seal(keys: RecordKeys, plaintext: bytes, aad: bytes) -> bytes:
    ct = AESGCM(keys.aead_key).encrypt(_next_nonce(keys), plaintext, aad)
    keys.seq += 1
    return ct


def record_open(keys: RecordKeys, ciphertext: bytes, aad: bytes) -> bytes:
    try:
        pt = AESGCM(keys.aead_key).decrypt(_next_nonce(keys), ciphertext, aad)
    except InvalidTag:
        raise RecordError("record authentication failed") from None
    keys.seq += 1
    return pt


def record_header(content_type: int, length: int) -> bytes:
    if length > MAX_RECORD:
        raise FramingError(f"record payload of {length} bytes exceeds {MAX_RECORD}")
    return struct.pack(">BH", content_type, length)


def frame_record(content_type: int, payload: bytes) -> bytes:
    return record_header(content_type, len(payload)) + payload


def split_records(data: bytes) -> list[tuple[int, bytes, bytes]]:
    """Split a buffer into ``(content_type, header, payload)``; no partial records allowed."""
    out = []
    pos = 0
    while pos < len(data):
        if len(data) - pos < HEADER_LEN:
            raise FramingError("truncated record header")
        ctype, length = struct.unpack_from(">BH", data, pos)
        end = pos + HEADER_LEN + length
        if end > len(data):
            raise FramingError("record length exceeds buffer")
        if ctype not in ContentType._value2member_map_:
            raise FramingError(f"unknown record content type {ctype}")
        out.append((ctype, data[pos : pos + HEADER_LEN], data[pos + HEADER_LEN : end]))
        pos = end
    return out


def seal_record(keys: RecordKeys, inner_type: int, payload: bytes) -> bytes:
    """Encrypted record: outer type application_data, inner type appended to the plaintext."""
    header = record_header(ContentType.APPLICATION_DATA, len(payload) + 1 + TAG_LEN)
    return header + record_seal(keys, payload + bytes([inner_type]), header)


def open_record(keys: RecordKeys, header: bytes, payload: bytes) -> tuple[int, bytes]:
    plain = record_open(keys, payload, header)
    if not plain:
        raise RecordError("empty inner plaintext")
    return plain[-1], plain[:-1]
