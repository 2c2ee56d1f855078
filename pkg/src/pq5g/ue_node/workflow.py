"""Two-UE workflow driver: register, open sessions, handshake, exchange one message each way."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from ..core5g import USER_PLANE_LINKS, build_core, make_network
from ..core5g.topology import Topology, UE1_SUPI, UE2_SUPI, subscriber_key
from ..errors import ConfigurationError, Pq5gError
from ..handshake.certs import CertificateAuthority
from ..handshake.loopback import make_identity
from ..kem.hybrid import DEFAULT_MODE, KemMode
from ..rng import derive_rng
from .node import UeConfig, UeNode
from .transcript import first_missing_step, order_violations

SCHEMA_ID = "pq5g.demo_result/v1"


def default_configs(topology: Topology, ue1_role: str = "client") -> tuple[UeConfig, UeConfig]:
    """UE configs for the topology's first two UEs (or the built-in SUPIs)."""
    specs = topology.ues[:2]
    supis = [s.supi for s in specs] if len(specs) == 2 else [UE1_SUPI, UE2_SUPI]
    gnbs = [s.gnb for s in specs] if len(specs) == 2 else [topology.gnbs[0].id] * 2
    roles = (ue1_role, "server" if ue1_role == "client" else "client")
    out = []
    for supi, gnb, role in zip(supis, gnbs, roles):
        record = topology.subscriber(supi)
        k = record.k if record is not None else subscriber_key(supi)
        out.append(UeConfig(supi, k, role, gnb))
    return out[0], out[1]


@dataclass
class UeReport:
    supi: str
    role: str
    ue_ip: str | None
    transcript: list[dict]
    order_violations: list[str]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class DemoResult:
    success: bool
    requested_mode: str
    negotiated_mode: str | None
    seed: int | None
    transport: str
    dn_enabled: bool
    ue1: UeReport
    ue2: UeReport
    handshake_duration_s: float | None
    digests: dict[str, str | None]
    failing_step: str | None = None
    error: str | None = None
    links: dict[str, int] = field(default_factory=dict)
    drops: dict[str, int] = field(default_factory=dict)
    dn_frames: int = 0
    node_events: list[dict] = field(default_factory=list)
    tap: object | None = field(default=None, repr=False, compare=False)

    def transcripts(self) -> dict[str, UeReport]:
        return {self.ue1.supi: self.ue1, self.ue2.supi: self.ue2}

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_ID,
            "success": self.success,
            "requested_mode": self.requested_mode,
            "negotiated_mode": self.negotiated_mode,
            "seed": self.seed,
            "transport": self.transport,
            "dn_enabled": self.dn_enabled,
            "ue1": self.ue1.to_dict(),
            "ue2": self.ue2.to_dict(),
            "handshake_duration_s": self.handshake_duration_s,
            "digests": dict(self.digests),
            "failing_step": self.failing_step,
            "error": self.error,
            "network": {"links": dict(self.links), "drops": dict(self.drops), "dn_frames": self.dn_frames},
            "node_events": list(self.node_events),
        }


class WorkflowFailure(Pq5gError):
    def __init__(self, step: str, reason: str):
        super().__init__(f"failed at {step}: {reason}")
        self.step = step
        self.reason = reason


def _digest(data: bytes | None) -> str | None:
    return None if data is None else hashlib.sha256(data).hexdigest()


def run_workflow(
    topology: Topology,
    ue1_cfg: UeConfig | None = None,
    ue2_cfg: UeConfig | None = None,
    mode: KemMode = DEFAULT_MODE,
    message: bytes = b"hello",
    seed: int | None = None,
    *,
    transport: str = "inproc",
    now: int | None = None,
) -> DemoResult:
    """Run the full two-UE workflow and report what each UE observed.

    Failures never raise: they come back as ``success=False`` with the first
    step the affected UE did not reach.
    """
    if ue1_cfg is None or ue2_cfg is None:
        d1, d2 = default_configs(topology)
        ue1_cfg, ue2_cfg = ue1_cfg or d1, ue2_cfg or d2
    if {ue1_cfg.role, ue2_cfg.role} != {"client", "server"}:
        raise ConfigurationError("exactly one UE must be the client and one the server")
    now = int(time.time()) if now is None else now
    provisioning = derive_rng(seed, "provisioning")
    ca = CertificateAuthority.from_seed("pq5g-root", provisioning.randbytes(32))
    net = make_network(topology, transport)
    try:
        build_core(topology, net, derive_rng(seed, "amf"))
        ues = []
        for cfg, peer in ((ue1_cfg, ue2_cfg), (ue2_cfg, ue1_cfg)):
            identity = cfg.identity or make_identity(ca, cfg.supi, provisioning, now)
            cfg = UeConfig(cfg.supi, cfg.k, cfg.role, cfg.gnb, cfg.modes or (mode,), identity)
            ues.append(net.attach(UeNode(cfg, derive_rng(seed, cfg.supi), [ca.anchor], now, peer.supi)))
        result = _drive(net, ues, message)
    finally:
        net.close()
    ue1, ue2 = ues
    links = net.tap.counts()
    result.update(
        seed=seed,
        transport=net.kind,
        dn_enabled=topology.dn_enabled,
        links=links,
        drops=net.drop_counts(),
        dn_frames=sum(n for name, n in links.items() if name.startswith("n9:")),
        node_events=[{"node": e.node, "event": e.event, "detail": e.detail} for e in net.events],
        tap=net.tap,
        requested_mode=str(mode),
        ue1=_report(ue1),
        ue2=_report(ue2),
    )
    return DemoResult(**result)


def _report(ue: UeNode) -> UeReport:
    ok = ue.failure is None
    return UeReport(ue.config.supi, ue.role, str(ue.ue_ip) if ue.ue_ip else None, ue.transcript.to_list(),
                    order_violations(ue.transcript, ue.role, complete=ok))


def _drive(net, ues: list[UeNode], message: bytes) -> dict:
    client = next(u for u in ues if u.role == "client")
    server = next(u for u in ues if u.role == "server")
    out: dict = {"success": False, "negotiated_mode": None, "handshake_duration_s": None,
                 "digests": {"message": _digest(message), "server_received": None,
                             "reply": None, "client_received": None}}

    def fail(ue: UeNode, default_step: str, reason: str) -> dict:
        step = ue.failure.step if ue.failure else (first_missing_step(ue.transcript, ue.role) or default_step)
        out.update(failing_step=step, error=f"{ue.config.supi}: {ue.failure.reason if ue.failure else reason}")
        return out

    try:
        # registration and PDU sessions
        for ue in ues:
            ue.start_registration()
        net.run()
        for ue in ues:
            if not ue.registered:
                return fail(ue, "Registered", "not registered")
        for ue in ues:
            if ue.session is None:
                return fail(ue, "SessionEstablished", "no PDU session")

        # key pairs and handshake, each UE offering its configured modes
        t0 = time.perf_counter()
        server.listen()
        client.connect(server.ue_ip)
        net.run()
        out["handshake_duration_s"] = time.perf_counter() - t0
        for ue in (client, server):
            if ue.connection is None or not ue.connection.connected:
                reason = ue.connection.error if ue.connection and ue.connection.error else "handshake incomplete"
                return fail(ue, "HandshakeComplete", reason)
        out["negotiated_mode"] = str(client.connection.mode)

        # one message each way
        client.secure_send(message)
        net.run()
        got = server.secure_recv()
        out["digests"]["server_received"] = _digest(got)
        if got != message:
            return fail(server, "MessageReceived", "message not delivered intact")
        server.secure_send(got)
        net.run()
        back = client.secure_recv()
        out["digests"]["reply"] = _digest(got)
        out["digests"]["client_received"] = _digest(back)
        if back != message:
            return fail(client, "MessageReceived", "reply not delivered intact")
    except (Pq5gError, TimeoutError, RuntimeError) as exc:
        culprit = next((u for u in ues if u.failure), client)
        return fail(culprit, "Registered", f"{type(exc).__name__}: {exc}")
    out["success"] = True
    return out
