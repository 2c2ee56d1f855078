"""In-process handshake driver and a provisioning helper for client/server pairs."""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Callable

from ..kem.hybrid import KemMode
from ..rng import derive_rng
from .certs import CertificateAuthority, Identity, public_bytes
from .connection import Connection
from .machine import Role, ServerConfig

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

VALIDITY = 86400


@dataclass
class Transmission:
    index: int
    sender: Role
    record: bytes


Tamper = Callable[[int, Role, bytes], bytes]


def make_identity(ca: CertificateAuthority, subject: str, rng, now: int) -> Identity:
    key = Ed25519PrivateKey.from_private_bytes(rng.randbytes(32))
    cert = ca.issue(subject, public_bytes(key), now - 60, now + VALIDITY)
    return Identity(cert, key)


def make_pair(
    client_modes,
    server_modes=None,
    seed: int | None = 0,
    now: int | None = None,
    client_id: str = "imsi-001010000000001",
    server_id: str = "imsi-001010000000002",
) -> tuple[Connection, Connection]:
    """A provisioned client/server pair sharing one root CA, fully determined by ``seed``."""
    now = int(time.time()) if now is None else now
    setup = derive_rng(seed, "provisioning")
    ca = CertificateAuthority.from_seed("pq5g-root", setup.randbytes(32))
    client_ident = make_identity(ca, client_id, setup, now)
    server_ident = make_identity(ca, server_id, setup, now)
    client_modes = [client_modes] if isinstance(client_modes, KemMode) else list(client_modes)
    server_modes = client_modes if server_modes is None else (
        [server_modes] if isinstance(server_modes, KemMode) else list(server_modes)
    )
    client = Connection.client(
        client_modes, derive_rng(seed, "client"), client_ident, [ca.anchor], now, expected_peer=server_id
    )
    server = Connection.server(
        ServerConfig(server_modes, server_ident, [ca.anchor], now, expected_peer=client_id),
        derive_rng(seed, "server"),
    )
    return client, server


def run_handshake(client: Connection, server: Connection, tamper: Tamper | None = None) -> list[Transmission]:
    """Deliver records FIFO between the two endpoints until both fall silent."""
    queue = deque((Role.CLIENT, r) for r in client.initiate())
    log: list[Transmission] = []
    while queue:
        sender, record = queue.popleft()
        index = len(log)
        if tamper is not None:
            record = tamper(index, sender, record)
        log.append(Transmission(index, sender, record))
        target = server if sender is Role.CLIENT else client
        queue.extend((target.role, out) for out in target.receive(record))
    return log


def flip_byte(index: int, position: int, mask: int = 0xFF) -> Tamper:
    def tamper(i: int, sender: Role, record: bytes) -> bytes:
        if i != index:
            return record
        buf = bytearray(record)
        buf[position] ^= mask
        return bytes(buf)

    return tamper
