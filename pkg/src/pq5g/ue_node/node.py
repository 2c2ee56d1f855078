"""UE actor: registers, opens a PDU session, and runs the secure channel over the user plane."""

from __future__ import annotations

import dataclasses
import ipaddress
from dataclasses import dataclass

from ..core5g.amf import auth_response
from ..core5g.net import Node
from ..core5g.packets import InnerPacket, Msg, control, parse_control, port_unwrap, port_wrap, user_data
from ..core5g.state import PduSession
from ..errors import FramingError, StateError
from ..handshake.certs import Identity
from ..handshake.connection import Connection
from ..handshake.machine import ServerConfig
from ..kem.hybrid import KemMode, x25519_keypair
from .transcript import EventTranscript

TLS_PORT = 4433
CLIENT_PORT = 49152
ROLES = ("client", "server")


@dataclass(frozen=True)
class UeConfig:
    supi: str
    k: bytes
    role: str
    gnb: str
    modes: tuple[KemMode, ...] = ()
    identity: Identity | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, not {self.role!r}")
        object.__setattr__(self, "modes", tuple(self.modes))


@dataclass(frozen=True)
class Failure:
    step: str
    reason: str


@dataclass
class Datagram:
    src: ipaddress.IPv4Address
    src_port: int
    dst_port: int
    data: bytes


class UeNode(Node):
    kind = "ue"

    def __init__(self, config: UeConfig, rng, trust_anchors=(), now: int | None = None,
                 expected_peer: str | None = None):
        super().__init__(config.supi)
        self.config = config
        self.rng = rng
        self.trust_anchors = list(trust_anchors)
        self.now = now
        self.expected_peer = expected_peer
        self.transcript = EventTranscript()
        self.registered = False
        self.session: PduSession | None = None
        self.connection: Connection | None = None
        self.peer: tuple[ipaddress.IPv4Address, int] | None = None
        self.received: list[bytes] = []
        self.datagrams: list[Datagram] = []
        self.failure: Failure | None = None

    @property
    def role(self) -> str:
        return self.config.role

    @property
    def ue_ip(self) -> ipaddress.IPv4Address | None:
        return self.session.ue_ip if self.session else None

    @property
    def local_port(self) -> int:
        return TLS_PORT if self.role == "server" else CLIENT_PORT

    @property
    def session_active(self) -> bool:
        c = self.connection
        return c is not None and not c.failed

    def _fail(self, step: str, reason: str) -> None:
        if self.failure is None:
            self.failure = Failure(step, reason)

    # -- control plane ---------------------------------------------------

    def start_registration(self) -> None:
        self.send(self.config.gnb, control(Msg.REGISTRATION_REQUEST, supi=self.config.supi))

    def handle(self, src: str, data: bytes) -> None:
        try:
            msg, body = parse_control(data)
        except FramingError as exc:
            self.log("Dropped", str(exc))
            return
        if msg is Msg.USER_DATA:
            self._on_user_data(body)
            return
        supi = self.config.supi
        if msg is Msg.AUTH_CHALLENGE:
            nonce = bytes.fromhex(body["nonce"])
            res = auth_response(self.config.k, nonce)
            self.send(self.config.gnb, control(Msg.AUTH_RESPONSE, supi=supi, nonce=nonce.hex(), response=res.hex()))
        elif msg is Msg.REGISTRATION_ACCEPT:
            self.registered = True
            self.transcript.add("Registered", f"{supi} via {self.config.gnb}")
            self.send(self.config.gnb, control(Msg.PDU_SESSION_REQUEST, supi=supi, session_id=1))
        elif msg is Msg.REGISTRATION_REJECT:
            self._fail("Registered", f"registration_reject({body.get('cause')})")
        elif msg is Msg.PDU_SESSION_ACCEPT:
            self.session = PduSession.from_wire(body)
            self.transcript.add(
                "SessionEstablished",
                f"ue_ip {self.session.ue_ip} ul_teid {self.session.uplink_teid} "
                f"dl_teid {self.session.downlink_teid} upf {self.session.serving_upf}",
            )
        elif msg is Msg.PDU_SESSION_REJECT:
            self._fail("SessionEstablished", f"session_reject({body.get('cause')})")
        else:
            self.log("Dropped", f"unexpected {msg.name}")

    # -- user plane ------------------------------------------------------

    def send_datagram(self, dst_ip, dst_port: int, data: bytes, src_port: int | None = None) -> None:
        if self.session is None:
            raise StateError(f"{self.config.supi} has no PDU session")
        packet = InnerPacket(self.session.ue_ip, ipaddress.IPv4Address(dst_ip),
                             port_wrap(self.local_port if src_port is None else src_port, dst_port, data))
        self.send(self.config.gnb, user_data(packet.encode()))

    def _transmit(self, records: list[bytes]) -> None:
        ip, port = self.peer
        for r in records:
            self.send_datagram(ip, port, r)

    def _on_user_data(self, inner: bytes) -> None:
        try:
            packet = InnerPacket.decode(inner)
            sport, dport, data = port_unwrap(packet.payload)
        except FramingError as exc:
            self.log("Dropped", str(exc))
            return
        if dport != self.local_port or self.connection is None:
            self.datagrams.append(Datagram(packet.src, sport, dport, data))
            return
        if self.peer is None:
            self.peer = (packet.src, sport)
        elif self.peer != (packet.src, sport):
            self.log("Dropped", f"record from unexpected peer {packet.src}:{sport}")
            return
        out = self.connection.receive(data)
        self._sync_events()
        if out:
            self._transmit(out)
        while self.connection.inbox:
            msg = self.connection.inbox.popleft()
            self.received.append(msg)
            self.transcript.add("MessageReceived", f"{len(msg)} bytes")
        if self.connection.failed:
            self._fail("HandshakeComplete" if "HandshakeComplete" not in self.transcript else "MessageReceived",
                       self.connection.error or "connection failed")

    def _sync_events(self) -> None:
        for tag, detail in self.connection.drain_events():
            self.transcript.add(tag, detail)

    # -- secure channel --------------------------------------------------

    def listen(self, modes=None) -> None:
        """Server side: prepare the key-share material and accept one connection."""
        if self.role != "server":
            raise StateError("only the server UE listens")
        if self.session is None:
            raise StateError("listen requires a PDU session")
        modes = list(modes or self.config.modes)
        classical = None
        if any(m.is_hybrid for m in modes):
            classical, _ = x25519_keypair(self.rng.randbytes(32))
            self.transcript.add("KeypairGenerated", "x25519 ephemeral key share")
        config = ServerConfig(modes, self.config.identity, self.trust_anchors, self.now,
                              self.expected_peer, classical_key=classical)
        self.connection = Connection.server(config, self.rng)
        self.peer = None

    def connect(self, peer_ip, modes=None, port: int = TLS_PORT) -> None:
        if self.role != "client":
            raise StateError("only the client UE connects")
        if self.session is None:
            raise StateError("connect requires a PDU session")
        self.connection = Connection.client(
            list(modes or self.config.modes), self.rng, self.config.identity,
            self.trust_anchors, self.now, self.expected_peer,
        )
        self.peer = (ipaddress.IPv4Address(peer_ip), port)
        records = self.connection.initiate()
        self._sync_events()
        self._transmit(records)

    def secure_send(self, plaintext: bytes) -> None:
        if self.connection is None or not self.connection.connected:
            raise StateError("secure_send before the handshake completed")
        records = self.connection.send(plaintext)
        self.transcript.add("MessageSent", f"{len(plaintext)} bytes")
        self._transmit(records)

    def secure_recv(self) -> bytes | None:
        """Next authenticated plaintext, or None if nothing has arrived."""
        if self.connection is None or not (self.connection.connected or self.received):
            raise StateError("secure_recv before the handshake completed")
        return self.received.pop(0) if self.received else None

    def close(self) -> None:
        self.connection = None
        self.peer = None


def swap_roles(a, b):
    """Exchange client/server roles between two UE configs or idle UE nodes."""
    for ue in (a, b):
        if isinstance(ue, UeNode) and ue.session_active:
            raise StateError(f"{ue.config.supi} has an active secure session")
    if isinstance(a, UeNode) and isinstance(b, UeNode):
        a.config, b.config = (dataclasses.replace(a.config, role=b.config.role),
                              dataclasses.replace(b.config, role=a.config.role))
        return a, b
    return dataclasses.replace(a, role=b.role), dataclasses.replace(b, role=a.role)
