"""HKDF-SHA256, the TLS 1.3 label expansion and the handshake key schedule."""

from __future__ import annotations

import hashlib
import hmac
import struct
from dataclasses import dataclass, replace

HASH_LEN = 32
ZEROS = bytes(HASH_LEN)
EMPTY_HASH = hashlib.sha256(b"").digest()


def hkdf_extract(salt: bytes, ikm: bytes) -> bytes:
    return hmac.new(salt or ZEROS, ikm, hashlib.sha256).digest()


def hkdf_expand(prk: bytes, info: bytes, length: int) -> bytes:
    if length > 255 * HASH_LEN:
        raise ValueError("HKDF-Expand output too long")
    out, block, i = b"", b"", 1
    while len(out) < length:
        block = hmac.new(prk, block + info + bytes([i]), hashlib.sha256).digest()
        out += block
        i += 1
    return out[:length]


def hkdf_label(label: str, context: bytes, length: int) -> bytes:
    full = b"tls13 " + label.encode()
    return struct.pack(">H", length) + bytes([len(full)]) + full + bytes([len(context)]) + context


def expand_label(secret: bytes, label: str, context: bytes, length: int) -> bytes:
    return hkdf_expand(secret, hkdf_label(label, context, length), length)


def finished_key(traffic_secret: bytes) -> bytes:
    return expand_label(traffic_secret, "finished", b"", HASH_LEN)


def finished_mac(traffic_secret: bytes, transcript_hash: bytes) -> bytes:
    return hmac.new(finished_key(traffic_secret), transcript_hash, hashlib.sha256).digest()


class TranscriptHash:
    """Append-only running SHA-256 over serialized handshake messages."""

    def __init__(self):
        self._hash = hashlib.sha256()
        self.length = 0

    def update(self, message: bytes) -> None:
        self._hash.update(message)
        self.length += len(message)

    def digest(self) -> bytes:
        return self._hash.copy().digest()


@dataclass(frozen=True)
class KeySchedule:
    early_secret: bytes
    handshake_secret: bytes
    master_secret: bytes
    client_hs_traffic: bytes
    server_hs_traffic: bytes
    client_app_traffic: bytes | None = None
    server_app_traffic: bytes | None = None

    def with_application(self, transcript_at_server_finished: bytes) -> "KeySchedule":
        return replace(
            self,
            client_app_traffic=expand_label(
                self.master_secret, "c ap traffic", transcript_at_server_finished, HASH_LEN
            ),
            server_app_traffic=expand_label(
                self.master_secret, "s ap traffic", transcript_at_server_finished, HASH_LEN
            ),
        )


def key_schedule(ikm: bytes, transcript_at_hello: bytes) -> KeySchedule:
    """Handshake-stage schedule from the combined KEM secret and the CH..SH hash."""
    early = hkdf_extract(ZEROS, ZEROS)
    handshake = hkdf_extract(expand_label(early, "derived", EMPTY_HASH, HASH_LEN), ikm)
    master = hkdf_extract(expand_label(handshake, "derived", EMPTY_HASH, HASH_LEN), ZEROS)
    return KeySchedule(
        early_secret=early,
        handshake_secret=handshake,
        master_secret=master,
        client_hs_traffic=expand_label(handshake, "c hs traffic", transcript_at_hello, HASH_LEN),
        server_hs_traffic=expand_label(handshake, "s hs traffic", transcript_at_hello, HASH_LEN),
    )
