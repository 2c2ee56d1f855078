"""UE contexts, PDU sessions and the allocators behind them."""

from __future__ import annotations

import enum
import ipaddress
from dataclasses import dataclass

from ..errors import ResourceError

MAX_TEID = 0xFFFFFFFF


class RegState(enum.Enum):
    DEREGISTERED = "Deregistered"
    REGISTERED = "Registered"


@dataclass
class UeContext:
    supi: str
    reg_state: RegState = RegState.DEREGISTERED
    ue_ip: ipaddress.IPv4Address | None = None

    @property
    def registered(self) -> bool:
        return self.reg_state is RegState.REGISTERED


@dataclass(frozen=True)
class PduSession:
    session_id: int
    supi: str
    ue_ip: ipaddress.IPv4Address
    uplink_teid: int
    downlink_teid: int
    serving_gnb: str
    serving_upf: str

    def to_wire(self) -> dict:
        return {
            "session_id": self.session_id,
            "supi": self.supi,
            "ue_ip": str(self.ue_ip),
            "uplink_teid": self.uplink_teid,
            "downlink_teid": self.downlink_teid,
            "serving_gnb": self.serving_gnb,
            "serving_upf": self.serving_upf,
        }

    @classmethod
    def from_wire(cls, d: dict) -> "PduSession":
        return cls(
            int(d["session_id"]),
            str(d["supi"]),
            ipaddress.IPv4Address(d["ue_ip"]),
            int(d["uplink_teid"]),
            int(d["downlink_teid"]),
            str(d["serving_gnb"]),
            str(d["serving_upf"]),
        )


class IpAllocator:
    """Sequential allocation from the second host address; the first host is the UPF gateway."""

    def __init__(self, pool: ipaddress.IPv4Network):
        self.pool = ipaddress.IPv4Network(pool)
        self.gateway = self.pool.network_address + 1
        self._next = int(self.pool.network_address) + 2
        self._last = int(self.pool.broadcast_address) - 1

    def allocate(self) -> ipaddress.IPv4Address:
        if self._next > self._last:
            raise ResourceError(f"IP pool {self.pool} exhausted")
        addr = ipaddress.IPv4Address(self._next)
        self._next += 1
        return addr

    @property
    def remaining(self) -> int:
        return max(0, self._last - self._next + 1)

    def __contains__(self, addr) -> bool:
        return ipaddress.IPv4Address(addr) in self.pool


class TeidAllocator:
    """Monotonic TEIDs starting at 1 (TEID 0 is reserved)."""

    def __init__(self, start: int = 1):
        self._next = start

    def allocate(self) -> int:
        if self._next > MAX_TEID:
            raise ResourceError("TEID space exhausted")
        teid = self._next
        self._next += 1
        return teid
