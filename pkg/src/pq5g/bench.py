"""Handshake latency bench: ``clients`` concurrent client actors against one server actor."""

from __future__ import annotations

import statistics
import time
from collections import deque
from dataclasses import dataclass

from .handshake.certs import CertificateAuthority
from .handshake.connection import Connection
from .handshake.loopback import make_identity
from .handshake.machine import ServerConfig
from .kem import BACKEND
from .kem.hybrid import KemMode
from .rng import derive_rng

SCHEMA_ID = "pq5g.bench_report/v1"


@dataclass
class BenchRow:
    mode: KemMode
    samples_us: list[float]
    failures: int

    @property
    def count(self) -> int:
        return len(self.samples_us) + self.failures

    def to_dict(self) -> dict:
        s = sorted(self.samples_us)
        if len(s) >= 2:
            p95 = statistics.quantiles(s, n=20, method="inclusive")[18]
        else:
            p95 = s[0] if s else 0.0
        return {
            "mode": str(self.mode),
            "kind": self.mode.kind.value,
            "level": self.mode.level,
            "count": self.count,
            "failures": self.failures,
            "mean_us": statistics.fmean(s) if s else 0.0,
            "median_us": statistics.median(s) if s else 0.0,
            "p95_us": p95,
            "min_us": s[0] if s else 0.0,
            "max_us": s[-1] if s else 0.0,
        }


class _ServerActor:
    """One listening server that keeps a separate connection per client."""

    def __init__(self, config: ServerConfig, rng):
        self.config = config
        self.rng = rng
        self.connections: dict[int, Connection] = {}

    def receive(self, client: int, record: bytes) -> list[bytes]:
        conn = self.connections.get(client)
        if conn is None:
            conn = self.connections[client] = Connection.server(self.config, self.rng)
        return conn.receive(record)


def bench_mode(mode: KemMode, iters: int, clients: int = 1, seed: int | None = 0) -> BenchRow:
    now = int(time.time())
    setup = derive_rng(seed, f"bench/{mode}")
    ca = CertificateAuthority.from_seed("pq5g-root", setup.randbytes(32))
    server_id, client_id = "bench-server", "bench-client"
    server_ident = make_identity(ca, server_id, setup, now)
    client_ident = make_identity(ca, client_id, setup, now)
    rng = derive_rng(seed, f"bench/{mode}/run")
    samples: list[float] = []
    failures = 0
    for _ in range(iters):
        server = _ServerActor(ServerConfig([mode], server_ident, [ca.anchor], now, client_id), rng)
        conns = [Connection.client([mode], rng, client_ident, [ca.anchor], now, server_id) for _ in range(clients)]
        start = [0] * clients
        done: dict[int, int] = {}
        queue: deque[tuple[str, int, bytes]] = deque()
        for i, c in enumerate(conns):
            start[i] = time.perf_counter_ns()
            queue.extend(("s", i, r) for r in c.initiate())
        # Interleaved FIFO delivery: every client's flights share one queue.
        while queue:
            to, i, record = queue.popleft()
            if to == "s":
                queue.extend(("c", i, r) for r in server.receive(i, record))
            else:
                queue.extend(("s", i, r) for r in conns[i].receive(record))
                if conns[i].connected and i not in done:
                    done[i] = time.perf_counter_ns()
        for i, c in enumerate(conns):
            srv = server.connections.get(i)
            ok = c.connected and srv is not None and srv.connected
            if ok:
                samples.append((done[i] - start[i]) / 1000.0)
            else:
                failures += 1
    return BenchRow(mode, samples, failures)


def run_bench(modes, iters: int, clients: int = 1, seed: int | None = 0) -> dict:
    if iters < 1 or clients < 1:
        raise ValueError("iters and clients must be positive")
    rows = [bench_mode(m, iters, clients, seed).to_dict() for m in modes]
    return {
        "schema": SCHEMA_ID,
        "iters": iters,
        "clients": clients,
        "seed": seed,
        "backend": BACKEND,
        "transport": "inproc",
        "rows": rows,
        "failures": sum(r["failures"] for r in rows),
    }
