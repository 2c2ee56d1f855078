"""SMF: PDU session establishment, UE IP and TEID allocation, N4 rule installation."""

from __future__ import annotations

import ipaddress

from ..errors import FramingError, ResourceError, SessionReject
from .net import Node
from .packets import Msg, control, parse_control
from .state import IpAllocator, PduSession, RegState, TeidAllocator, UeContext
from .topology import Topology


class Smf(Node):
    kind = "smf"

    def __init__(self, topology: Topology, amf_id: str = "amf", node_id: str = "smf"):
        super().__init__(node_id)
        self.topology = topology
        self.amf_id = amf_id
        self.ips = IpAllocator(topology.ip_pool)
        self.teids = {u.id: TeidAllocator() for u in topology.upfs}
        self.sessions: dict[str, PduSession] = {}
        self.dn_enabled = topology.dn_enabled and len(topology.upfs) > 1
        # Inbound N9 tunnel per UPF, allocated before any UE session.
        self.n9_teids = {u: alloc.allocate() for u, alloc in self.teids.items()} if self.dn_enabled else {}
        self._pending: dict[str, tuple[PduSession, set[str]]] = {}

    def handle(self, src: str, data: bytes) -> None:
        try:
            msg, body = parse_control(data)
            if not isinstance(body, dict):
                raise FramingError("user data on the control plane")
            if msg is Msg.N11_CREATE_SESSION and src == self.amf_id:
                supi = str(body["supi"])
                ue = UeContext(supi, RegState(body.get("reg_state", RegState.DEREGISTERED.value)))
                self._create(ue, str(body["gnb"]), int(body.get("session_id", 1)))
            elif msg is Msg.N4_SESSION_ACK and src in self.teids:
                self._ack(src, str(body["supi"]))
            else:
                self.log("Dropped", f"unexpected {msg.name} from {src}")
        except (FramingError, KeyError, ValueError, TypeError) as exc:
            self.log("Dropped", f"from {src}: {exc!r}")

    def _create(self, ue: UeContext, gnb: str, session_id: int) -> None:
        try:
            session = establish_pdu_session(self, ue, gnb, session_id)
        except (SessionReject, ResourceError) as exc:
            cause = exc.cause if isinstance(exc, SessionReject) else "insufficient_resources"
            self.log("SessionRejected", f"{ue.supi}: {cause}")
            self.send(self.amf_id, control(Msg.PDU_SESSION_REJECT, supi=ue.supi, session_id=session_id, cause=cause))
            return
        waiting = {session.serving_upf}
        self.send(session.serving_upf, control(
            Msg.N4_SESSION_ESTABLISH, n9_teid=self.n9_teids.get(session.serving_upf), **session.to_wire()
        ))
        if self.dn_enabled:
            for peer in self.teids:
                if peer != session.serving_upf:
                    waiting.add(peer)
                    self.send(peer, control(
                        Msg.N4_ROUTE_ADD, supi=ue.supi, ue_ip=str(session.ue_ip),
                        via=session.serving_upf, teid=self.n9_teids[session.serving_upf],
                    ))
        self._pending[ue.supi] = (session, waiting)

    def _ack(self, upf: str, supi: str) -> None:
        pending = self._pending.get(supi)
        if pending is None:
            self.log("Dropped", f"unsolicited N4 ack from {upf}")
            return
        session, waiting = pending
        waiting.discard(upf)
        if not waiting:
            del self._pending[supi]
            self.log("SessionEstablished", f"{supi} {session.ue_ip} on {session.serving_upf}")
            self.send(self.amf_id, control(Msg.PDU_SESSION_ACCEPT, **session.to_wire()))


def establish_pdu_session(smf: Smf, ue: UeContext, gnb: str, session_id: int = 1) -> PduSession:
    if ue.reg_state is not RegState.REGISTERED:
        raise SessionReject("ue_not_registered", ue.supi)
    if ue.supi in smf.sessions:
        raise SessionReject("session_exists", ue.supi)
    upf = smf.topology.gnb(gnb).upf
    teids = smf.teids[upf]
    session = PduSession(
        session_id=session_id,
        supi=ue.supi,
        ue_ip=smf.ips.allocate(),
        uplink_teid=teids.allocate(),
        downlink_teid=teids.allocate(),
        serving_gnb=gnb,
        serving_upf=upf,
    )
    smf.sessions[ue.supi] = session
    ue.ue_ip = ipaddress.IPv4Address(session.ue_ip)
    return session
