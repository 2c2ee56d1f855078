from __future__ import annotations

import dataclasses
import ipaddress
import json
import random

import pytest
from hypothesis import settings, strategies as st
from hypothesis.stateful import RuleBasedStateMachine, invariant, precondition, rule

from pq5g.core5g import (
    InProcessNetwork,
    InnerPacket,
    IpAllocator,
    Msg,
    PduSession,
    RegState,
    SubscriberRecord,
    SubscriberRegistry,
    TeidAllocator,
    Topology,
    UeContext,
    auth_response,
    build_core,
    control,
    default_topology,
    establish_pdu_session,
    gtpu_encap,
    parse_control,
    register_ue,
    resolve_topology,
    subscriber_key,
    upf_forward,
)
from pq5g.core5g.gnb import Direction, gnb_relay
from pq5g.core5g.smf import Smf
from pq5g.core5g.topology import UE1_SUPI, UE2_SUPI, GnbSpec, UeSpec, UpfSpec
from pq5g.core5g.upf import Upf
from pq5g.errors import ConfigurationError, RegistrationReject, ResourceError, SessionReject
from pq5g.ue_node import UeConfig, UeNode
from pq5g.ue_node.workflow import default_configs


def attach_ues(topology, net, configs=None, seed=0):
    configs = configs or default_configs(topology)
    return [net.attach(UeNode(c, random.Random(seed + i))) for i, c in enumerate(configs)]


def registered_core(dn=False):
    topology = default_topology(dn)
    net = InProcessNetwork()
    core = build_core(topology, net, random.Random(1))
    ues = attach_ues(topology, net)
    for ue in ues:
        ue.start_registration()
    net.run()
    return topology, net, core, ues


# -- registration -------------------------------------------------------------


def test_registration_success_and_sessions():
    _, net, core, (ue1, ue2) = registered_core()
    assert ue1.registered and ue2.registered
    assert core.amf.registry.context(UE1_SUPI).reg_state is RegState.REGISTERED
    assert str(ue1.ue_ip) == "10.45.0.2" and str(ue2.ue_ip) == "10.45.0.3"
    teids = {ue1.session.uplink_teid, ue1.session.downlink_teid, ue2.session.uplink_teid, ue2.session.downlink_teid}
    assert len(teids) == 4
    assert core.amf.registry.context(UE2_SUPI).ue_ip == ue2.ue_ip
    assert net.drop_counts() == {}


def test_unknown_subscriber_rejected():
    topology = default_topology()
    net = InProcessNetwork()
    build_core(topology, net, random.Random(1))
    stranger = net.attach(UeNode(UeConfig("imsi-001019999999999", bytes(32), "client", "gnb1"), random.Random(0)))
    stranger.start_registration()
    net.run()
    assert not stranger.registered
    assert stranger.failure.reason == "registration_reject(unknown_subscriber)"


def test_wrong_key_rejected():
    topology = default_topology()
    net = InProcessNetwork()
    core = build_core(topology, net, random.Random(1))
    ue = net.attach(UeNode(UeConfig(UE1_SUPI, bytes(32), "client", "gnb1"), random.Random(0)))
    ue.start_registration()
    net.run()
    assert ue.failure.reason == "registration_reject(auth_failure)"
    assert core.amf.registry.context(UE1_SUPI).reg_state is RegState.DEREGISTERED


def test_register_ue_function():
    k = subscriber_key(UE1_SUPI)
    reg = SubscriberRegistry([SubscriberRecord(UE1_SUPI, k), SubscriberRecord("imsi-x", k, allowed=False)])
    rng = random.Random(3)
    nonce = reg.issue_nonce(UE1_SUPI, rng)
    ctx = register_ue(reg, UE1_SUPI, auth_response(k, nonce), nonce)
    assert ctx.registered
    with pytest.raises(RegistrationReject) as exc:
        register_ue(reg, UE1_SUPI, auth_response(k, nonce), nonce)  # nonce is one-shot
    assert exc.value.cause == "auth_failure"
    with pytest.raises(RegistrationReject) as exc:
        reg.issue_nonce("imsi-x", rng)
    assert exc.value.cause == "not_allowed"
    with pytest.raises(RegistrationReject) as exc:
        register_ue(reg, "imsi-nobody", b"", b"")
    assert exc.value.cause == "unknown_subscriber"


def test_hundred_sequential_registrations_stay_unique():
    subs = [f"imsi-00101{i:010d}" for i in range(100)]
    topology = Topology([SubscriberRecord(s, subscriber_key(s)) for s in subs],
                        [GnbSpec("gnb1", "upf1")], [UpfSpec("upf1")])
    net = InProcessNetwork()
    core = build_core(topology, net, random.Random(1))
    ues = [net.attach(UeNode(UeConfig(s, subscriber_key(s), "client", "gnb1"), random.Random(i)))
           for i, s in enumerate(subs)]
    for ue in ues:
        ue.start_registration()
        net.run()
    assert all(ue.registered for ue in ues)
    ips = [ue.ue_ip for ue in ues]
    assert len(set(ips)) == 100 and all(ip in topology.ip_pool for ip in ips)
    teids = [t for ue in ues for t in (ue.session.uplink_teid, ue.session.downlink_teid)]
    assert len(set(teids)) == 200
    assert len(core.smf.sessions) == 100


# -- sessions -----------------------------------------------------------------


def test_session_requires_registration():
    smf = Smf(default_topology())
    with pytest.raises(SessionReject) as exc:
        establish_pdu_session(smf, UeContext(UE1_SUPI), "gnb1")
    assert exc.value.cause == "ue_not_registered"
    ue = UeContext(UE1_SUPI, RegState.REGISTERED)
    session = establish_pdu_session(smf, ue, "gnb1")
    assert session.serving_upf == "upf1" and ue.ue_ip == session.ue_ip
    with pytest.raises(SessionReject) as exc:
        establish_pdu_session(smf, ue, "gnb1")
    assert exc.value.cause == "session_exists"


def test_deregistered_ue_gets_session_reject():
    topology = default_topology()
    net = InProcessNetwork()
    build_core(topology, net, random.Random(1))
    ue = attach_ues(topology, net)[0]
    ue.send("gnb1", control(Msg.PDU_SESSION_REQUEST, supi=ue.config.supi, session_id=1))
    net.run()
    assert ue.session is None
    assert ue.failure.reason == "session_reject(ue_not_registered)"


def test_pool_exhaustion():
    subs = [SubscriberRecord("imsi-a", subscriber_key("imsi-a"))]
    topology = Topology(subs, [GnbSpec("gnb1", "upf1")], [UpfSpec("upf1")], ip_pool="10.0.0.0/30")
    alloc = IpAllocator(topology.ip_pool)
    assert str(alloc.allocate()) == "10.0.0.2"
    with pytest.raises(ResourceError):
        alloc.allocate()
    net = InProcessNetwork()
    core = build_core(topology, net, random.Random(1))
    core.smf.ips.allocate()  # the only assignable address is already taken
    ue = net.attach(UeNode(UeConfig("imsi-a", subs[0].k, "client", "gnb1"), random.Random(0)))
    ue.start_registration()
    net.run()
    assert ue.registered and ue.session is None
    assert ue.failure.reason == "session_reject(insufficient_resources)"


def test_pool_too_small_for_subscribers():
    subs = [SubscriberRecord(s, subscriber_key(s)) for s in ("imsi-a", "imsi-b")]
    with pytest.raises(ConfigurationError):
        Topology(subs, [GnbSpec("gnb1", "upf1")], [UpfSpec("upf1")], ip_pool="10.0.0.0/31")


def test_teid_allocator_starts_at_one():
    t = TeidAllocator()
    assert [t.allocate() for _ in range(3)] == [1, 2, 3]


class RegistrationMachine(RuleBasedStateMachine):
    """No PDU session can exist for a UE that never completed registration."""

    def __init__(self):
        super().__init__()
        self.topology = default_topology()
        self.net = InProcessNetwork()
        self.core = build_core(self.topology, self.net, random.Random(0))
        self.ues = attach_ues(self.topology, self.net)

    @rule(i=st.integers(0, 1))
    def request_session(self, i):
        ue = self.ues[i]
        ue.send("gnb1", control(Msg.PDU_SESSION_REQUEST, supi=ue.config.supi, session_id=1))
        self.net.run()

    @rule(i=st.integers(0, 1))
    def register(self, i):
        self.ues[i].start_registration()
        self.net.run()

    @precondition(lambda self: True)
    @rule(i=st.integers(0, 1))
    def bogus_auth(self, i):
        ue = self.ues[i]
        ue.send("gnb1", control(Msg.AUTH_RESPONSE, supi=ue.config.supi, nonce="00" * 32, response="11" * 32))
        self.net.run()

    @invariant()
    def sessions_only_after_registration(self):
        for supi in self.core.smf.sessions:
            assert self.core.amf.registry.context(supi).reg_state is RegState.REGISTERED
        for ue in self.ues:
            if ue.session is not None:
                assert ue.registered


TestRegistrationMachine = RegistrationMachine.TestCase
TestRegistrationMachine.settings = settings(max_examples=30, stateful_step_count=12, deadline=None)


# -- user plane ---------------------------------------------------------------


def uplink(ue, dst, payload=b"payload"):
    inner = InnerPacket(ue.ue_ip, ipaddress.IPv4Address(dst), payload).encode()
    return gtpu_encap(ue.session.uplink_teid, inner)


def test_local_routing_single_upf():
    _, net, core, (ue1, ue2) = registered_core()
    upf = core.upfs["upf1"]
    [(hop, frame)] = upf_forward(upf, uplink(ue1, ue2.ue_ip), "gnb1")
    assert hop == "gnb1"
    assert frame[4:8] == ue2.session.downlink_teid.to_bytes(4, "big")


def test_upf_drops():
    _, net, core, (ue1, ue2) = registered_core()
    upf = core.upfs["upf1"]
    assert upf_forward(upf, uplink(ue1, "10.99.0.1"), "gnb1") == []  # outside the pool
    spoofed = gtpu_encap(ue1.session.uplink_teid, InnerPacket(ue2.ue_ip, ue1.ue_ip, b"x").encode())
    assert upf_forward(upf, spoofed, "gnb1") == []
    unknown = gtpu_encap(999, InnerPacket(ue1.ue_ip, ue2.ue_ip, b"x").encode())
    assert upf_forward(upf, unknown, "gnb1") == []
    assert upf_forward(upf, b"\x30\xff", "gnb1") == []
    assert upf.drops == 4
    assert sum(1 for e in net.events_for("upf1") if e.event == "Dropped") == 4


def test_dn_path_crosses_n9_exactly_once():
    _, net, core, (ue1, ue2) = registered_core(dn=True)
    assert ue1.session.serving_upf == "upf1" and ue2.session.serving_upf == "upf2"
    before = net.tap.counts()
    ue1.send_datagram(ue2.ue_ip, 9, b"over the data network")
    net.run()
    after = net.tap.counts()
    assert after["n9:upf1-upf2"] - before.get("n9:upf1-upf2", 0) == 1
    assert ue2.datagrams[-1].data == b"over the data network"
    assert [e.event for e in net.events_for("upf1")].count("DnForward") == 1
    assert "DnForward" not in [e.event for e in net.events_for("upf2")]


def test_n9_frames_are_never_reforwarded():
    _, net, core, (ue1, ue2) = registered_core(dn=True)
    upf2 = core.upfs["upf2"]
    # a frame on upf2's N9 TEID addressed to a UE served by upf1 must not bounce back
    frame = gtpu_encap(upf2.n9_teid, InnerPacket(ue2.ue_ip, ue1.ue_ip, b"x").encode())
    assert upf_forward(upf2, frame, "upf1") == []


def test_n9_teids_allocated_first():
    _, _, core, (ue1, ue2) = registered_core(dn=True)
    assert core.smf.n9_teids == {"upf1": 1, "upf2": 1}
    assert ue1.session.uplink_teid == 2 and ue2.session.uplink_teid == 2


def test_gnb_drops_unknown_downlink_teid():
    _, net, core, (ue1, _) = registered_core()
    gnb = core.gnbs["gnb1"]
    frame = gtpu_encap(4242, InnerPacket(ue1.ue_ip, ue1.ue_ip, b"x").encode())
    assert gnb_relay(gnb, Direction.DOWNLINK, frame, "upf1") == []
    assert gnb.drops == 1


def test_gnb_drops_user_data_without_session():
    topology = default_topology()
    net = InProcessNetwork()
    core = build_core(topology, net, random.Random(1))
    from pq5g.core5g.packets import user_data

    assert gnb_relay(core.gnbs["gnb1"], Direction.UPLINK, user_data(b"x" * 12), UE1_SUPI) == []


def test_gnb_relays_control_unchanged():
    _, net, core, _ = registered_core()
    msg = control(Msg.REGISTRATION_REQUEST, supi=UE1_SUPI)
    assert gnb_relay(core.gnbs["gnb1"], Direction.UPLINK, msg, UE1_SUPI) == [("amf", msg)]


def test_session_wire_round_trip():
    s = PduSession(1, UE1_SUPI, ipaddress.IPv4Address("10.45.0.2"), 1, 2, "gnb1", "upf1")
    msg, body = parse_control(control(Msg.PDU_SESSION_ACCEPT, **s.to_wire()))
    assert msg is Msg.PDU_SESSION_ACCEPT and PduSession.from_wire(body) == s


def test_upf_rejects_conflicting_rules():
    upf = Upf("upf1")
    s = PduSession(1, UE1_SUPI, ipaddress.IPv4Address("10.45.0.2"), 1, 2, "gnb1", "upf1")
    upf.install(s)
    with pytest.raises(ValueError):
        upf.install(dataclasses.replace(s, supi=UE2_SUPI))


# -- topology -----------------------------------------------------------------


@pytest.mark.parametrize("dn", [False, True])
def test_topology_json_round_trip(tmp_path, dn):
    t = default_topology(dn)
    path = tmp_path / "t.json"
    t.save(path)
    assert Topology.load(path) == t


def test_bundled_topologies_match_defaults():
    from importlib.resources import files

    data = files("pq5g") / "data"
    assert Topology.from_dict(json.loads((data / "topology_local.json").read_text())) == default_topology(False)
    assert Topology.from_dict(json.loads((data / "topology_dn.json").read_text())) == default_topology(True)


def test_resolve_topology_prefers_path_then_env(tmp_path, monkeypatch):
    path = tmp_path / "dn.json"
    default_topology(True).save(path)
    monkeypatch.setenv("PQ5G_TOPOLOGY", str(path))
    assert resolve_topology().dn_enabled
    monkeypatch.delenv("PQ5G_TOPOLOGY")
    assert not resolve_topology().dn_enabled
    assert resolve_topology(None, dn=True).dn_enabled


@pytest.mark.parametrize("mutate", [
    lambda d: d["gnbs"][0].update(upf="nope"),
    lambda d: d["upfs"].clear(),
    lambda d: d.update(schema="other/v9"),
    lambda d: d["subscribers"][0].update(k="00"),
    lambda d: d["ues"][0].update(gnb="gnb9"),
    lambda d: d.pop("gnbs"),
    lambda d: d["upfs"].append(dict(d["upfs"][0])),
])
def test_invalid_topologies(mutate):
    doc = default_topology().to_dict()
    mutate(doc)
    with pytest.raises(ConfigurationError):
        Topology.from_dict(doc)


def test_unreadable_topology(tmp_path):
    with pytest.raises(ConfigurationError):
        Topology.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError):
        Topology.load(bad)


def test_ue_spec_lookup():
    t = default_topology(True)
    assert t.ue(UE2_SUPI) == UeSpec(UE2_SUPI, "gnb2", t.ues[1].endpoint)
    with pytest.raises(ConfigurationError):
        t.ue("imsi-none")
