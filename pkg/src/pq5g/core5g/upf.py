"""UPF: GTP-U forwarding with local routing and an optional N9 hop across the DN."""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass

from ..errors import FramingError
from .gtpu import gtpu_decap, gtpu_encap
from .net import Node
from .packets import InnerPacket, Msg, control, parse_control
from .state import PduSession


@dataclass(frozen=True)
class DnRoute:
    via: str
    teid: int


class Upf(Node):
    kind = "upf"

    def __init__(self, node_id: str, smf_id: str = "smf"):
        super().__init__(node_id)
        self.smf_id = smf_id
        self.by_uplink: dict[int, PduSession] = {}
        self.by_ip: dict[ipaddress.IPv4Address, PduSession] = {}
        self.dn_routes: dict[ipaddress.IPv4Address, DnRoute] = {}
        self.n9_teid: int | None = None
        self.drops = 0
        self.forwarded = 0

    def install(self, session: PduSession) -> None:
        if session.uplink_teid in self.by_uplink or session.ue_ip in self.by_ip:
            raise ValueError(f"conflicting forwarding rule for {session.supi}")
        self.by_uplink[session.uplink_teid] = session
        self.by_ip[session.ue_ip] = session

    def handle(self, src: str, data: bytes) -> None:
        if src == self.smf_id:
            self._n4(data)
            return
        for dst, frame in upf_forward(self, data, src):
            self.send(dst, frame)

    def _n4(self, data: bytes) -> None:
        try:
            msg, body = parse_control(data)
            if msg is Msg.N4_SESSION_ESTABLISH:
                session = PduSession.from_wire(body)
                self.install(session)
                if body.get("n9_teid") is not None:
                    self.n9_teid = int(body["n9_teid"])
            elif msg is Msg.N4_ROUTE_ADD:
                self.dn_routes[ipaddress.IPv4Address(body["ue_ip"])] = DnRoute(str(body["via"]), int(body["teid"]))
            else:
                raise FramingError(f"unexpected {msg.name} on N4")
        except (FramingError, KeyError, ValueError, TypeError) as exc:
            self.log("Dropped", f"N4: {exc!r}")
            return
        self.send(self.smf_id, control(Msg.N4_SESSION_ACK, supi=str(body["supi"])))

    def drop(self, reason: str) -> list:
        self.drops += 1
        self.log("Dropped", reason)
        return []


def upf_forward(upf: Upf, frame: bytes, src: str = "") -> list[tuple[str, bytes]]:
    """Route one GTP-U frame; returns ``(next_hop, frame)`` pairs (empty on drop)."""
    try:
        teid, inner = gtpu_decap(frame)
        packet = InnerPacket.decode(inner)
    except FramingError as exc:
        return upf.drop(f"malformed frame from {src}: {exc}")
    from_dn = upf.n9_teid is not None and teid == upf.n9_teid
    if not from_dn:
        session = upf.by_uplink.get(teid)
        if session is None:
            return upf.drop(f"unknown uplink TEID {teid} from {src}")
        if packet.src != session.ue_ip:
            return upf.drop(f"source {packet.src} does not own TEID {teid}")
    local = upf.by_ip.get(packet.dst)
    if local is not None:
        upf.forwarded += 1
        return [(local.serving_gnb, gtpu_encap(local.downlink_teid, inner))]
    route = upf.dn_routes.get(packet.dst)
    if route is not None and not from_dn:
        upf.forwarded += 1
        upf.log("DnForward", f"{packet.src} -> {packet.dst} via {route.via}")
        return [(route.via, gtpu_encap(route.teid, inner))]
    return upf.drop(f"no route to {packet.dst}")
