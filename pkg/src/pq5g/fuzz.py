"""Randomized robustness suites behind ``pq5g fuzz``.

Each suite feeds random or mutated inputs to one parser or protocol layer and
counts violations: an unexpected exception type, a wrong round trip, or a
tampered handshake that still connects.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

from .core5g.gtpu import gtpu_decap, gtpu_encap
from .errors import FramingError, Pq5gError
from .handshake.loopback import flip_byte, make_pair, run_handshake
from .handshake.messages import decode_message
from .kem import keygen, decaps, encaps, get_params
from .kem.hybrid import KemMode
from .kem.keys import KemCiphertext
from .rng import derive_rng

SCHEMA_ID = "pq5g.fuzz_report/v1"


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "cases": self.cases, "violations": len(self.violations),
                "examples": self.violations[:5], "seconds": round(self.seconds, 4)}


def gtpu_suite(rng, iters: int) -> SuiteResult:
    res = SuiteResult("gtpu")
    for _ in range(iters):
        teid = rng.getrandbits(32)
        inner = rng.randbytes(rng.randrange(0, 2048))
        res.cases += 1
        if gtpu_decap(gtpu_encap(teid, inner)) != (teid, inner):
            res.violations.append(f"round trip failed for teid {teid}")
        junk = rng.randbytes(rng.randrange(0, 64))
        res.cases += 1
        try:
            gtpu_decap(junk)
        except FramingError:
            pass
        except Exception as exc:  # noqa: BLE001 - anything else is a finding
            res.violations.append(f"decap raised {type(exc).__name__} on {junk.hex()}")
    return res


def message_suite(rng, iters: int) -> SuiteResult:
    res = SuiteResult("handshake-messages")
    for _ in range(iters):
        data = bytes([rng.choice((1, 2, 11, 15, 20, rng.randrange(256)))]) + rng.randbytes(rng.randrange(0, 96))
        res.cases += 1
        try:
            decode_message(data)
        except Pq5gError:
            pass
        except Exception as exc:  # noqa: BLE001
            res.violations.append(f"decode raised {type(exc).__name__} on {data[:16].hex()}")
    return res


def kem_suite(rng, iters: int, level: int = 768) -> SuiteResult:
    """Random ciphertexts must decapsulate to SHAKE256(z || ct) without raising."""
    res = SuiteResult(f"kem-implicit-rejection-{level}")
    params = get_params(level)
    ek, dk = keygen(params, rng.randbytes(64))
    for _ in range(iters):
        ct = rng.randbytes(params.ct_len)
        res.cases += 1
        want = hashlib.shake_256(dk.z + ct).digest(32)
        if bytes(decaps(dk, KemCiphertext(params, ct))) != want:
            res.violations.append(f"rejection value mismatch for ct {ct[:8].hex()}")
    ct, ss = encaps(ek, rng.randbytes(32))
    res.cases += 1
    if decaps(dk, ct) != ss:
        res.violations.append("honest ciphertext did not decapsulate")
    return res


def tamper_suite(rng, iters: int, mode: KemMode) -> SuiteResult:
    """Random single-byte flips of handshake records in transit must never connect."""
    res = SuiteResult(f"handshake-tamper-{mode}")
    now = int(time.time())
    base = run_handshake(*make_pair(mode, seed=1, now=now))
    sizes = [len(t.record) for t in base]
    for _ in range(iters):
        index = rng.randrange(len(sizes))
        pos = rng.randrange(sizes[index])
        mask = rng.randrange(1, 256)
        client, server = make_pair(mode, seed=1, now=now)
        run_handshake(client, server, flip_byte(index, pos, mask))
        res.cases += 1
        if client.connected or server.connected:
            res.violations.append(f"flip record {index} byte {pos} mask {mask:#x} still connected")
    return res


def run_fuzz(iters: int = 200, seed: int | None = 0, modes=(KemMode.hybrid(768),)) -> dict:
    rng = derive_rng(seed, "fuzz")
    suites = [
        lambda: gtpu_suite(rng, iters),
        lambda: message_suite(rng, iters),
        lambda: kem_suite(rng, max(1, iters // 4)),
        *[(lambda m=m: tamper_suite(rng, max(1, iters // 4), m)) for m in modes],
    ]
    results = []
    for suite in suites:
        t = time.perf_counter()
        r = suite()
        r.seconds = time.perf_counter() - t
        results.append(r.to_dict())
    return {
        "schema": SCHEMA_ID,
        "seed": seed,
        "iters": iters,
        "suites": results,
        "violations": sum(r["violations"] for r in results),
    }
