"""Simulated 5G core (AMF, SMF, UPF) and RAN (gNB) over a message-passing network."""

from __future__ import annotations

from dataclasses import dataclass

from .amf import Amf, SubscriberRegistry, auth_response, register_ue
from .gnb import Direction, Gnb, gnb_relay
from .gtpu import FLAGS, G_PDU, GTPU_PORT, HEADER_LEN, GtpuHeader, gtpu_decap, gtpu_encap
from .net import (
    USER_PLANE_LINKS,
    InProcessNetwork,
    LinkTap,
    Network,
    Node,
    NodeEvent,
    UdpNetwork,
    dump_bytes,
    parse_dump,
    read_dump,
    write_dump,
)
from .packets import InnerPacket, Msg, control, parse_control, port_unwrap, port_wrap
from .smf import Smf, establish_pdu_session
from .state import IpAllocator, PduSession, RegState, TeidAllocator, UeContext
from .topology import (
    DEFAULT_POOL,
    TOPOLOGY_ENV,
    UE1_SUPI,
    UE2_SUPI,
    Endpoint,
    GnbSpec,
    SubscriberRecord,
    Topology,
    UeSpec,
    UpfSpec,
    default_topology,
    resolve_topology,
    subscriber_key,
)
from .upf import Upf, upf_forward


@dataclass
class Core:
    amf: Amf
    smf: Smf
    gnbs: dict[str, Gnb]
    upfs: dict[str, Upf]


def node_addresses(topology: Topology) -> dict[str, tuple[str, int]]:
    """Configured UDP bind addresses for every node the topology names."""
    out = {"amf": (topology.amf.address, topology.amf.port), "smf": (topology.smf.address, topology.smf.port)}
    for g in topology.gnbs:
        out[g.id] = (g.endpoint.address, g.endpoint.port)
    for u in topology.upfs:
        out[u.id] = (u.endpoint.address, u.endpoint.port or GTPU_PORT)
    for ue in topology.ues:
        out[ue.supi] = (ue.endpoint.address, ue.endpoint.port)
    return out


def make_network(topology: Topology, transport: str = "inproc") -> Network:
    if transport == "inproc":
        return InProcessNetwork()
    if transport == "udp":
        return UdpNetwork(node_addresses(topology))
    raise ValueError(f"unknown transport {transport!r}")


def build_core(topology: Topology, net: Network, rng) -> Core:
    registry = SubscriberRegistry(topology.subscribers)
    amf = net.attach(Amf(registry, rng))
    smf = net.attach(Smf(topology))
    upfs = {u.id: net.attach(Upf(u.id)) for u in topology.upfs}
    gnbs = {g.id: net.attach(Gnb(g.id, g.upf)) for g in topology.gnbs}
    return Core(amf, smf, gnbs, upfs)


