"""Network topology: subscribers, gNBs, UPFs, and the UEs attached to them."""

from __future__ import annotations

import hashlib
import ipaddress
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError

SCHEMA_ID = "pq5g.topology/v1"
DEFAULT_POOL = "10.45.0.0/16"
TOPOLOGY_ENV = "PQ5G_TOPOLOGY"


@dataclass(frozen=True)
class SubscriberRecord:
    supi: str
    k: bytes
    allowed: bool = True

    def __post_init__(self):
        if len(self.k) != 32:
            raise ConfigurationError(f"subscriber {self.supi}: key must be 32 bytes")


@dataclass(frozen=True)
class Endpoint:
    address: str = "127.0.0.1"
    port: int = 0


@dataclass(frozen=True)
class GnbSpec:
    id: str
    upf: str
    endpoint: Endpoint = Endpoint()


@dataclass(frozen=True)
class UpfSpec:
    id: str
    endpoint: Endpoint = Endpoint()


@dataclass(frozen=True)
class UeSpec:
    supi: str
    gnb: str
    endpoint: Endpoint = Endpoint()


@dataclass
class Topology:
    subscribers: list[SubscriberRecord]
    gnbs: list[GnbSpec]
    upfs: list[UpfSpec]
    ues: list[UeSpec] = field(default_factory=list)
    dn_enabled: bool = False
    ip_pool: ipaddress.IPv4Network = field(default_factory=lambda: ipaddress.IPv4Network(DEFAULT_POOL))
    amf: Endpoint = Endpoint("127.0.0.2", 38412)
    smf: Endpoint = Endpoint("127.0.0.3", 8805)

    def __post_init__(self):
        self.ip_pool = ipaddress.IPv4Network(self.ip_pool)
        self.validate()

    def validate(self) -> None:
        upf_ids = [u.id for u in self.upfs]
        gnb_ids = [g.id for g in self.gnbs]
        supis = [s.supi for s in self.subscribers]
        for label, ids in (("UPF", upf_ids), ("gNB", gnb_ids), ("subscriber", supis)):
            if len(set(ids)) != len(ids):
                raise ConfigurationError(f"duplicate {label} identifiers")
        if not self.upfs or not self.gnbs:
            raise ConfigurationError("a topology needs at least one gNB and one UPF")
        reserved = {"amf", "smf"}
        if reserved & (set(upf_ids) | set(gnb_ids)) or set(upf_ids) & set(gnb_ids):
            raise ConfigurationError("node identifiers must be unique across the topology")
        for g in self.gnbs:
            if g.upf not in upf_ids:
                raise ConfigurationError(f"gNB {g.id} refers to unknown UPF {g.upf}")
        for u in self.ues:
            if u.gnb not in gnb_ids:
                raise ConfigurationError(f"UE {u.supi} refers to unknown gNB {u.gnb}")
        # network, gateway and broadcast addresses are not assignable
        if self.ip_pool.num_addresses - 3 < max(1, len(self.subscribers)):
            raise ConfigurationError(f"IP pool {self.ip_pool} cannot serve {len(self.subscribers)} subscribers")

    def subscriber(self, supi: str) -> SubscriberRecord | None:
        return next((s for s in self.subscribers if s.supi == supi), None)

    def gnb(self, gnb_id: str) -> GnbSpec:
        for g in self.gnbs:
            if g.id == gnb_id:
                return g
        raise ConfigurationError(f"unknown gNB {gnb_id}")

    def ue(self, supi: str) -> UeSpec:
        for u in self.ues:
            if u.supi == supi:
                return u
        raise ConfigurationError(f"topology has no UE {supi}")

    # -- JSON ------------------------------------------------------------

    def to_dict(self) -> dict:
        ep = lambda e: {"address": e.address, "port": e.port}  # noqa: E731
        return {
            "schema": SCHEMA_ID,
            "ip_pool": str(self.ip_pool),
            "dn_enabled": self.dn_enabled,
            "amf": ep(self.amf),
            "smf": ep(self.smf),
            "subscribers": [{"supi": s.supi, "k": s.k.hex(), "allowed": s.allowed} for s in self.subscribers],
            "gnbs": [{"id": g.id, "upf": g.upf, **ep(g.endpoint)} for g in self.gnbs],
            "upfs": [{"id": u.id, **ep(u.endpoint)} for u in self.upfs],
            "ues": [{"supi": u.supi, "gnb": u.gnb, **ep(u.endpoint)} for u in self.ues],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Topology":
        if doc.get("schema", SCHEMA_ID) != SCHEMA_ID:
            raise ConfigurationError(f"unsupported topology schema {doc.get('schema')!r}")

        def ep(d, default=Endpoint()):
            if isinstance(d, dict) and "address" in d:
                return Endpoint(d["address"], int(d.get("port", 0)))
            return default

        try:
            return cls(
                subscribers=[
                    SubscriberRecord(s["supi"], bytes.fromhex(s["k"]), bool(s.get("allowed", True)))
                    for s in doc["subscribers"]
                ],
                gnbs=[GnbSpec(g["id"], g["upf"], ep(g)) for g in doc["gnbs"]],
                upfs=[UpfSpec(u["id"], ep(u)) for u in doc["upfs"]],
                ues=[UeSpec(u["supi"], u["gnb"], ep(u)) for u in doc.get("ues", [])],
                dn_enabled=bool(doc.get("dn_enabled", False)),
                ip_pool=ipaddress.IPv4Network(doc.get("ip_pool", DEFAULT_POOL)),
                amf=ep(doc.get("amf"), Endpoint("127.0.0.2", 38412)),
                smf=ep(doc.get("smf"), Endpoint("127.0.0.3", 8805)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"malformed topology: {exc!r}") from None

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Topology":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read topology {path}: {exc}") from None
        return cls.from_dict(doc)

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def subscriber_key(supi: str) -> bytes:
    """Deterministic long-term key for built-in topologies."""
    return hashlib.sha256(b"pq5g-subscriber-key/" + supi.encode()).digest()


UE1_SUPI = "imsi-001010000000001"
UE2_SUPI = "imsi-001010000000002"


def default_topology(dn: bool = False) -> Topology:
    """One gNB on one UPF, or with ``dn`` each UE behind its own gNB/UPF joined by a DN link."""
    subs = [SubscriberRecord(s, subscriber_key(s)) for s in (UE1_SUPI, UE2_SUPI)]
    if not dn:
        return Topology(
            subscribers=subs,
            gnbs=[GnbSpec("gnb1", "upf1", Endpoint("127.0.0.11", 2152))],
            upfs=[UpfSpec("upf1", Endpoint("127.0.0.21", 2152))],
            ues=[UeSpec(UE1_SUPI, "gnb1", Endpoint("127.0.0.101", 4997)),
                 UeSpec(UE2_SUPI, "gnb1", Endpoint("127.0.0.102", 4997))],
        )
    return Topology(
        subscribers=subs,
        gnbs=[GnbSpec("gnb1", "upf1", Endpoint("127.0.0.11", 2152)),
              GnbSpec("gnb2", "upf2", Endpoint("127.0.0.12", 2152))],
        upfs=[UpfSpec("upf1", Endpoint("127.0.0.21", 2152)),
              UpfSpec("upf2", Endpoint("127.0.0.22", 2152))],
        ues=[UeSpec(UE1_SUPI, "gnb1", Endpoint("127.0.0.101", 4997)),
             UeSpec(UE2_SUPI, "gnb2", Endpoint("127.0.0.102", 4997))],
        dn_enabled=True,
    )


def resolve_topology(path: str | os.PathLike | None = None, dn: bool = False) -> Topology:
    """Explicit path, then ``$PQ5G_TOPOLOGY``, then the built-in default."""
    path = path or os.environ.get(TOPOLOGY_ENV)
    if path:
        return Topology.load(path)
    return default_topology(dn)
