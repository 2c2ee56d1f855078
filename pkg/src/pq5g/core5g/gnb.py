"""gNB: relays control messages to the AMF and tunnels user data to the UPF."""

from __future__ import annotations

import enum

from ..errors import FramingError
from .gtpu import gtpu_decap, gtpu_encap
from .net import Node
from .packets import Msg, parse_control, user_data
from .state import PduSession


class Direction(enum.Enum):
    UPLINK = "uplink"
    DOWNLINK = "downlink"


class Gnb(Node):
    kind = "gnb"

    def __init__(self, node_id: str, upf_id: str, amf_id: str = "amf"):
        super().__init__(node_id)
        self.upf_id = upf_id
        self.amf_id = amf_id
        self.ue_by_supi: dict[str, str] = {}
        self.session_by_ue: dict[str, PduSession] = {}
        self.ue_by_dl_teid: dict[int, str] = {}
        self.drops = 0

    def handle(self, src: str, data: bytes) -> None:
        direction = Direction.UPLINK if self.net.nodes[src].kind == "ue" else Direction.DOWNLINK
        for dst, out in gnb_relay(self, direction, data, src):
            self.send(dst, out)

    def drop(self, reason: str) -> list:
        self.drops += 1
        self.log("Dropped", reason)
        return []


def gnb_relay(gnb: Gnb, direction: Direction, message: bytes, src: str = "") -> list[tuple[str, bytes]]:
    """Forward one message; returns ``(next_hop, bytes)`` pairs (empty on drop)."""
    if direction is Direction.UPLINK:
        try:
            msg, body = parse_control(message)
        except FramingError as exc:
            return gnb.drop(f"malformed uplink from {src}: {exc}")
        if msg is Msg.USER_DATA:
            session = gnb.session_by_ue.get(src)
            if session is None:
                return gnb.drop(f"user data from {src} without a session")
            try:
                return [(gnb.upf_id, gtpu_encap(session.uplink_teid, body))]
            except FramingError as exc:
                return gnb.drop(str(exc))
        supi = body.get("supi") if isinstance(body, dict) else None
        if not isinstance(supi, str):
            return gnb.drop(f"control message from {src} without supi")
        gnb.ue_by_supi[supi] = src
        gnb.log("Relayed", f"uplink {msg.name} {supi}")
        return [(gnb.amf_id, message)]

    if src == gnb.upf_id:
        try:
            teid, inner = gtpu_decap(message)
        except FramingError as exc:
            return gnb.drop(f"malformed GTP-U from {src}: {exc}")
        ue = gnb.ue_by_dl_teid.get(teid)
        if ue is None:
            return gnb.drop(f"unknown downlink TEID {teid}")
        return [(ue, user_data(inner))]

    try:
        msg, body = parse_control(message)
    except FramingError as exc:
        return gnb.drop(f"malformed downlink from {src}: {exc}")
    supi = body.get("supi") if isinstance(body, dict) else None
    ue = gnb.ue_by_supi.get(supi)
    if ue is None:
        return gnb.drop(f"{msg.name} for unknown UE {supi}")
    if msg is Msg.PDU_SESSION_ACCEPT:
        try:
            session = PduSession.from_wire(body)
        except (KeyError, ValueError, TypeError) as exc:
            return gnb.drop(f"bad session accept: {exc!r}")
        gnb.session_by_ue[ue] = session
        gnb.ue_by_dl_teid[session.downlink_teid] = ue
    gnb.log("Relayed", f"downlink {msg.name} {supi}")
    return [(ue, message)]
