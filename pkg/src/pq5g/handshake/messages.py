"""Handshake message types and their byte-exact encodings (see FORMAT.md)."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..errors import FramingError, ModeError
from ..framing import Reader, frame, unframe, vec8, vec16
from ..kem.hybrid import X25519_LEN, KemMode
from .certs import Certificate

RANDOM_LEN = 32
VERIFY_DATA_LEN = 32


class HandshakeType(enum.IntEnum):
    CLIENT_HELLO = 1
    SERVER_HELLO = 2
    CERTIFICATE = 11
    CERTIFICATE_VERIFY = 15
    FINISHED = 20


class Alert(enum.IntEnum):
    HANDSHAKE_FAILURE = 40
    CERTIFICATE_ERROR = 42
    ILLEGAL_PARAMETER = 47
    DECRYPT_ERROR = 51

    @property
    def label(self) -> str:
        return self.name.lower()


def _mode(code: int) -> KemMode:
    try:
        return KemMode.from_code(code)
    except ModeError as exc:
        raise FramingError(str(exc)) from None


@dataclass(frozen=True)
class KeyShare:
    mode: KemMode
    kem_part: bytes
    classical_part: bytes = b""

    def encode(self) -> bytes:
        return self.mode.code.to_bytes(2, "big") + vec16(self.kem_part) + vec8(self.classical_part)


def _check_classical(mode: KemMode, classical: bytes) -> None:
    want = X25519_LEN if mode.is_hybrid else 0
    if len(classical) != want:
        raise FramingError(f"{mode} key share needs a {want}-byte classical part, got {len(classical)}")


@dataclass(frozen=True)
class ClientHello:
    random: bytes
    offered_modes: tuple[KemMode, ...]
    key_shares: tuple[KeyShare, ...]
    raw: bytes | None = field(default=None, compare=False, repr=False)

    msg_type = HandshakeType.CLIENT_HELLO

    def body(self) -> bytes:
        out = self.random + bytes([len(self.offered_modes)])
        out += b"".join(m.code.to_bytes(2, "big") for m in self.offered_modes)
        out += bytes([len(self.key_shares)]) + b"".join(s.encode() for s in self.key_shares)
        return out

    @classmethod
    def parse(cls, body: bytes) -> "ClientHello":
        r = Reader(body)
        random = r.take(RANDOM_LEN)
        offered = tuple(_mode(r.u16()) for _ in range(r.u8()))
        if not offered:
            raise FramingError("ClientHello offers no modes")
        if len(set(offered)) != len(offered):
            raise FramingError("ClientHello repeats an offered mode")
        shares = []
        for _ in range(r.u8()):
            mode = _mode(r.u16())
            kem_part, classical = r.vec16(), r.vec8()
            if mode not in offered:
                raise FramingError(f"key share for {mode} which was not offered")
            if len(kem_part) != mode.params.ek_len:
                raise FramingError(f"{mode} key share must carry a {mode.params.ek_len}-byte key")
            _check_classical(mode, classical)
            shares.append(KeyShare(mode, kem_part, classical))
        r.done()
        if len({s.mode for s in shares}) != len(shares):
            raise FramingError("more than one key share for a mode")
        return cls(random, offered, tuple(shares))


@dataclass(frozen=True)
class ServerHello:
    random: bytes
    selected_mode: KemMode
    key_share: KeyShare
    raw: bytes | None = field(default=None, compare=False, repr=False)

    msg_type = HandshakeType.SERVER_HELLO

    def body(self) -> bytes:
        return (
            self.random
            + self.selected_mode.code.to_bytes(2, "big")
            + vec16(self.key_share.kem_part)
            + vec8(self.key_share.classical_part)
        )

    @classmethod
    def parse(cls, body: bytes) -> "ServerHello":
        r = Reader(body)
        random = r.take(RANDOM_LEN)
        mode = _mode(r.u16())
        ct, classical = r.vec16(), r.vec8()
        r.done()
        if len(ct) != mode.params.ct_len:
            raise FramingError(f"{mode} ciphertext must be {mode.params.ct_len} bytes, got {len(ct)}")
        _check_classical(mode, classical)
        return cls(random, mode, KeyShare(mode, ct, classical))


@dataclass(frozen=True)
class CertificateMsg:
    certificate: Certificate
    raw: bytes | None = field(default=None, compare=False, repr=False)

    msg_type = HandshakeType.CERTIFICATE

    def body(self) -> bytes:
        return self.certificate.encode()

    @classmethod
    def parse(cls, body: bytes) -> "CertificateMsg":
        return cls(Certificate.decode(body))


@dataclass(frozen=True)
class CertificateVerify:
    signature: bytes
    raw: bytes | None = field(default=None, compare=False, repr=False)

    msg_type = HandshakeType.CERTIFICATE_VERIFY

    def body(self) -> bytes:
        return vec16(self.signature)

    @classmethod
    def parse(cls, body: bytes) -> "CertificateVerify":
        r = Reader(body)
        sig = r.vec16()
        r.done()
        return cls(sig)


@dataclass(frozen=True)
class Finished:
    verify_data: bytes
    raw: bytes | None = field(default=None, compare=False, repr=False)

    msg_type = HandshakeType.FINISHED

    def body(self) -> bytes:
        return self.verify_data

    @classmethod
    def parse(cls, body: bytes) -> "Finished":
        if len(body) != VERIFY_DATA_LEN:
            raise FramingError(f"Finished must carry {VERIFY_DATA_LEN} bytes, got {len(body)}")
        return cls(body)


HandshakeMessage = ClientHello | ServerHello | CertificateMsg | CertificateVerify | Finished

_PARSERS = {cls.msg_type: cls for cls in (ClientHello, ServerHello, CertificateMsg, CertificateVerify, Finished)}


def encode_message(msg: HandshakeMessage) -> bytes:
    """Wire bytes of a message; a parsed message returns its received bytes unchanged."""
    if msg.raw is not None:
        return msg.raw
    return frame(msg.msg_type, msg.body())


def decode_message(data: bytes) -> HandshakeMessage:
    msg_type, body = unframe(data)
    cls = _PARSERS.get(msg_type)
    if cls is None:
        raise FramingError(f"unknown handshake message type {msg_type}")
    msg = cls.parse(body)
    object.__setattr__(msg, "raw", bytes(data))
    return msg
