"""KEM modes and the classical-plus-ML-KEM hybrid combiner.

Hybrid mode pairs each ML-KEM level with X25519. The key-schedule input is
``classical_ss || pq_ss`` in that order (64 bytes); conventional mode feeds
the 32-byte ML-KEM secret alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from ..errors import ModeError, ParameterError
from .keys import SharedSecret
from .params import LEVELS, KemParams, get_params

X25519_LEN = 32


class ModeKind(enum.Enum):
    CONVENTIONAL = "conventional"
    HYBRID = "hybrid"


@dataclass(frozen=True, order=True)
class KemMode:
    kind: ModeKind
    level: int

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ModeError(f"unsupported ML-KEM level {self.level!r}")

    @classmethod
    def conventional(cls, level: int) -> "KemMode":
        return cls(ModeKind.CONVENTIONAL, level)

    @classmethod
    def hybrid(cls, level: int) -> "KemMode":
        return cls(ModeKind.HYBRID, level)

    @classmethod
    def parse(cls, text: str) -> "KemMode":
        """Parse ``"hybrid-768"`` / ``"conventional-512"``."""
        try:
            kind, level = text.strip().lower().rsplit("-", 1)
            return cls(ModeKind(kind), int(level))
        except (ValueError, KeyError):
            raise ModeError(f"cannot parse KEM mode {text!r}") from None

    @property
    def is_hybrid(self) -> bool:
        return self.kind is ModeKind.HYBRID

    @property
    def params(self) -> KemParams:
        return get_params(self.level)

    @property
    def code(self) -> int:
        """Two-byte wire identifier: 0x0A.. conventional, 0x0B.. hybrid."""
        return (0x0B00 if self.is_hybrid else 0x0A00) | LEVELS.index(self.level)

    @classmethod
    def from_code(cls, code: int) -> "KemMode":
        family, index = code >> 8, code & 0xFF
        if family not in (0x0A, 0x0B) or index >= len(LEVELS):
            raise ModeError(f"unknown KEM mode code 0x{code:04x}")
        kind = ModeKind.HYBRID if family == 0x0B else ModeKind.CONVENTIONAL
        return cls(kind, LEVELS[index])

    def __str__(self) -> str:
        return f"{self.kind.value}-{self.level}"


ALL_MODES = tuple(
    KemMode(kind, level) for kind in (ModeKind.CONVENTIONAL, ModeKind.HYBRID) for level in LEVELS
)
DEFAULT_MODE = KemMode.hybrid(768)


def hybrid_combine(
    mode: KemMode, pq_ss: SharedSecret | bytes, classical_ss: bytes | None = None
) -> bytes:
    pq = bytes(pq_ss)
    if len(pq) != 32:
        raise ParameterError(f"ML-KEM shared secret must be 32 bytes, got {len(pq)}")
    if mode.is_hybrid:
        if classical_ss is None:
            raise ModeError(f"{mode} requires a classical shared secret")
        if len(classical_ss) != X25519_LEN:
            raise ParameterError(f"X25519 shared secret must be 32 bytes, got {len(classical_ss)}")
        return bytes(classical_ss) + pq
    if classical_ss is not None:
        raise ModeError(f"{mode} takes no classical shared secret")
    return pq


def x25519_public(priv: X25519PrivateKey) -> bytes:
    return priv.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def x25519_keypair(seed: bytes) -> tuple[X25519PrivateKey, bytes]:
    priv = X25519PrivateKey.from_private_bytes(seed)
    return priv, x25519_public(priv)


def x25519_shared(priv: X25519PrivateKey, peer_public: bytes) -> bytes:
    """Raises ParameterError for malformed or low-order peer keys."""
    if len(peer_public) != X25519_LEN:
        raise ParameterError(f"X25519 public key must be 32 bytes, got {len(peer_public)}")
    try:
        return priv.exchange(X25519PublicKey.from_public_bytes(peer_public))
    except ValueError as exc:
        raise ParameterError(f"X25519 exchange failed: {exc}") from None
