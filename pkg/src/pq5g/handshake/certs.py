"""Single-issuer identity certificates signed with Ed25519.

Deliberately not X.509: one pre-provisioned root per topology issues a
certificate binding a UE's SUPI to its Ed25519 verification key.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from ..errors import FramingError

SIG_LEN = 64
PUBKEY_LEN = 32


class CertVerdict(enum.Enum):
    ACCEPT = "accept"
    UNKNOWN_ISSUER = "unknown_issuer"
    BAD_SIGNATURE = "bad_signature"
    EXPIRED = "expired"


def public_bytes(key: Ed25519PrivateKey | Ed25519PublicKey) -> bytes:
    if isinstance(key, Ed25519PrivateKey):
        key = key.public_key()
    return key.public_bytes(Encoding.Raw, PublicFormat.Raw)


@dataclass(frozen=True)
class Certificate:
    subject_id: str
    subject_sig_pubkey: bytes
    issuer_id: str
    not_before: int
    not_after: int
    signature: bytes = b""

    def tbs(self) -> bytes:
        """Signed portion: every field except the signature, length-prefixed."""
        subject = self.subject_id.encode()
        issuer = self.issuer_id.encode()
        return (
            struct.pack(">H", len(subject)) + subject
            + self.subject_sig_pubkey
            + struct.pack(">H", len(issuer)) + issuer
            + struct.pack(">QQ", self.not_before, self.not_after)
        )

    def encode(self) -> bytes:
        return self.tbs() + self.signature

    @classmethod
    def decode(cls, data: bytes) -> "Certificate":
        try:
            pos = 0
            (n,) = struct.unpack_from(">H", data, pos)
            pos += 2
            subject = data[pos : pos + n].decode()
            pos += n
            pubkey = data[pos : pos + PUBKEY_LEN]
            pos += PUBKEY_LEN
            (n,) = struct.unpack_from(">H", data, pos)
            pos += 2
            issuer = data[pos : pos + n].decode()
            pos += n
            not_before, not_after = struct.unpack_from(">QQ", data, pos)
            pos += 16
        except (struct.error, UnicodeDecodeError) as exc:
            raise FramingError(f"malformed certificate: {exc}") from None
        signature = data[pos:]
        if len(pubkey) != PUBKEY_LEN or len(signature) != SIG_LEN:
            raise FramingError("malformed certificate: truncated key or signature")
        return cls(subject, pubkey, issuer, not_before, not_after, signature)


@dataclass(frozen=True)
class TrustAnchor:
    issuer_id: str
    public_key: bytes


@dataclass
class CertificateAuthority:
    issuer_id: str
    signing_key: Ed25519PrivateKey

    @classmethod
    def from_seed(cls, issuer_id: str, seed: bytes) -> "CertificateAuthority":
        return cls(issuer_id, Ed25519PrivateKey.from_private_bytes(seed))

    @property
    def anchor(self) -> TrustAnchor:
        return TrustAnchor(self.issuer_id, public_bytes(self.signing_key))

    def issue(self, subject_id: str, subject_key: bytes, not_before: int, not_after: int) -> Certificate:
        unsigned = Certificate(subject_id, subject_key, self.issuer_id, not_before, not_after)
        return Certificate(
            subject_id, subject_key, self.issuer_id, not_before, not_after,
            self.signing_key.sign(unsigned.tbs()),
        )


@dataclass
class Identity:
    """A certificate plus the Ed25519 key it certifies."""

    certificate: Certificate
    signing_key: Ed25519PrivateKey


def validate_certificate(cert: Certificate, trust_anchors, now: int) -> CertVerdict:
    anchor = next((a for a in trust_anchors if a.issuer_id == cert.issuer_id), None)
    if anchor is None:
        return CertVerdict.UNKNOWN_ISSUER
    try:
        Ed25519PublicKey.from_public_bytes(anchor.public_key).verify(cert.signature, cert.tbs())
    except (InvalidSignature, ValueError):
        return CertVerdict.BAD_SIGNATURE
    if not cert.not_before <= now <= cert.not_after:
        return CertVerdict.EXPIRED
    return CertVerdict.ACCEPT
