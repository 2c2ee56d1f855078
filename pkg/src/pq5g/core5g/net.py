"""Message-passing substrate for the node actors.

Each node is a sequential actor: it owns its state and reacts to one message
at a time through :meth:`Node.handle`. Two transports deliver the messages:

* :class:`InProcessNetwork`, a single FIFO queue, fully deterministic.
* :class:`UdpNetwork`, one asyncio datagram socket per node on loopback.

Both record every frame into a :class:`LinkTap` keyed by link name.
"""

from __future__ import annotations

import asyncio
import os
import re
import struct
import time
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError, FramingError

# Which node kinds may talk to each other, and what the link is called.
LINK_KINDS = {
    frozenset({"ue", "gnb"}): "radio",
    frozenset({"gnb", "amf"}): "n2",
    frozenset({"amf", "smf"}): "n11",
    frozenset({"smf", "upf"}): "n4",
    frozenset({"gnb", "upf"}): "n3",
    frozenset({"upf"}): "n9",
}
USER_PLANE_LINKS = ("n3", "n9")


@dataclass(frozen=True)
class NodeEvent:
    node: str
    event: str
    detail: str = ""


class Node:
    kind = "node"

    def __init__(self, node_id: str):
        self.id = node_id
        self.net: Network | None = None

    def handle(self, src: str, data: bytes) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    def send(self, dst: str, data: bytes) -> None:
        if self.net is None:
            raise ConfigurationError(f"node {self.id} is not attached to a network")
        self.net.send(self.id, dst, data)

    def log(self, event: str, detail: str = "") -> None:
        if self.net is not None:
            self.net.events.append(NodeEvent(self.id, event, detail))


# -- link taps -------------------------------------------------------------

_DUMP_FRAME = struct.Struct(">QI")


@dataclass
class LinkTap:
    frames: dict[str, list[tuple[int, bytes]]] = field(default_factory=lambda: defaultdict(list))

    def record(self, link: str, data: bytes) -> None:
        self.frames[link].append((time.monotonic_ns(), bytes(data)))

    def links(self) -> list[str]:
        return sorted(self.frames)

    def counts(self) -> dict[str, int]:
        return {name: len(self.frames[name]) for name in self.links()}

    def write(self, directory: str | os.PathLike) -> list[Path]:
        out_dir = Path(directory)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for name in self.links():
            path = out_dir / (re.sub(r"[^A-Za-z0-9_.-]", "_", name) + ".pq5gcap")
            write_dump(path, self.frames[name])
            paths.append(path)
        return paths


def dump_bytes(frames) -> bytes:
    return b"".join(_DUMP_FRAME.pack(ts, len(data)) + data for ts, data in frames)


def write_dump(path: str | os.PathLike, frames) -> None:
    Path(path).write_bytes(dump_bytes(frames))


def parse_dump(blob: bytes) -> list[tuple[int, bytes]]:
    frames, pos = [], 0
    while pos < len(blob):
        if pos + _DUMP_FRAME.size > len(blob):
            raise FramingError(f"truncated dump record header at offset {pos}")
        ts, length = _DUMP_FRAME.unpack_from(blob, pos)
        pos += _DUMP_FRAME.size
        if pos + length > len(blob):
            raise FramingError(f"truncated dump frame at offset {pos}")
        frames.append((ts, blob[pos : pos + length]))
        pos += length
    return frames


def read_dump(path: str | os.PathLike) -> list[tuple[int, bytes]]:
    return parse_dump(Path(path).read_bytes())


# -- networks --------------------------------------------------------------


class Network:
    def __init__(self):
        self.nodes: dict[str, Node] = {}
        self.tap = LinkTap()
        self.events: list[NodeEvent] = []
        self.sent = 0

    def attach(self, node: Node) -> Node:
        if node.id in self.nodes:
            raise ConfigurationError(f"duplicate node id {node.id}")
        node.net = self
        self.nodes[node.id] = node
        return node

    def link_name(self, a: str, b: str) -> str:
        try:
            kinds = frozenset({self.nodes[a].kind, self.nodes[b].kind})
        except KeyError as exc:
            raise ConfigurationError(f"unknown node {exc.args[0]}") from None
        kind = LINK_KINDS.get(kinds)
        if kind is None or a == b:
            raise ConfigurationError(f"no link between {a} and {b}")
        lo, hi = sorted((a, b))
        return f"{kind}:{lo}-{hi}"

    def send(self, src: str, dst: str, data: bytes) -> None:
        link = self.link_name(src, dst)
        self.tap.record(link, data)
        self.sent += 1
        self._deliver(src, dst, bytes(data))

    def _deliver(self, src: str, dst: str, data: bytes) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    def run(self, max_messages: int = 100_000) -> int:  # pragma: no cover - abstract
        raise NotImplementedError

    def events_for(self, node: str) -> list[NodeEvent]:
        return [e for e in self.events if e.node == node]

    def drop_counts(self) -> dict[str, int]:
        return dict(sorted(Counter(e.node for e in self.events if e.event == "Dropped").items()))

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class InProcessNetwork(Network):
    """Single FIFO queue; delivery order is exactly send order."""

    kind = "inproc"

    def __init__(self):
        super().__init__()
        self.queue: deque[tuple[str, str, bytes]] = deque()

    def _deliver(self, src, dst, data):
        self.queue.append((src, dst, data))

    def run(self, max_messages: int = 100_000) -> int:
        handled = 0
        while self.queue:
            if handled >= max_messages:
                raise RuntimeError(f"network did not settle after {max_messages} messages")
            src, dst, data = self.queue.popleft()
            self.nodes[dst].handle(src, data)
            handled += 1
        return handled


class _NodeProtocol(asyncio.DatagramProtocol):
    def __init__(self, net: "UdpNetwork", node_id: str):
        self.net = net
        self.node_id = node_id

    def datagram_received(self, data, addr):
        self.net._on_datagram(self.node_id, data, addr)


class UdpNetwork(Network):
    """One UDP socket per node on loopback.

    With ``addresses`` each node binds its configured ``(host, port)``; a node
    whose address cannot be bound falls back to an ephemeral port on
    127.0.0.1. Without ``addresses`` every node gets an ephemeral port.
    """

    kind = "udp"

    def __init__(self, addresses: dict[str, tuple[str, int]] | None = None, settle_timeout: float = 5.0):
        super().__init__()
        self.addresses = dict(addresses or {})
        self.settle_timeout = settle_timeout
        self.loop = asyncio.new_event_loop()
        self.transports: dict[str, asyncio.DatagramTransport] = {}
        self.bound: dict[str, tuple[str, int]] = {}
        self._by_addr: dict[tuple[str, int], str] = {}
        self._in_flight = 0
        self._handled = 0
        self._errors: list[BaseException] = []

    def attach(self, node: Node) -> Node:
        super().attach(node)
        want = self.addresses.get(node.id, ("127.0.0.1", 0))
        transport = None
        for host, port in (want, ("127.0.0.1", 0)):
            try:
                transport, _ = self.loop.run_until_complete(
                    self.loop.create_datagram_endpoint(
                        lambda: _NodeProtocol(self, node.id), local_addr=(host, port)
                    )
                )
                break
            except OSError:
                continue
        if transport is None:
            raise ConfigurationError(f"cannot bind a UDP socket for node {node.id}")
        addr = transport.get_extra_info("sockname")[:2]
        self.transports[node.id] = transport
        self.bound[node.id] = addr
        self._by_addr[addr] = node.id
        return node

    def _deliver(self, src, dst, data):
        self._in_flight += 1
        self.transports[src].sendto(data, self.bound[dst])

    def _on_datagram(self, dst: str, data: bytes, addr) -> None:
        self._in_flight -= 1
        src = self._by_addr.get(tuple(addr[:2]))
        if src is None:
            return
        try:
            self.nodes[dst].handle(src, data)
            self._handled += 1
        except BaseException as exc:  # surfaced from run()
            self._errors.append(exc)

    async def _settle(self, max_messages: int) -> None:
        deadline = self.loop.time() + self.settle_timeout
        while self._in_flight > 0:
            if self.loop.time() > deadline:
                raise TimeoutError(f"{self._in_flight} datagrams still in flight")
            if self._handled > max_messages:
                raise RuntimeError(f"network did not settle after {max_messages} messages")
            await asyncio.sleep(0.0005)

    def run(self, max_messages: int = 100_000) -> int:
        start = self._handled
        self.loop.run_until_complete(self._settle(start + max_messages))
        if self._errors:
            raise self._errors.pop(0)
        return self._handled - start

    def close(self) -> None:
        for t in self.transports.values():
            t.close()
        self.transports.clear()
        if not self.loop.is_closed():
            self.loop.run_until_complete(asyncio.sleep(0))
            self.loop.close()
