"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

The lines are also repeated in the terminal summary (see conftest.py).
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from contextlib import contextmanager

import jsonschema
import pytest
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

import oracles
from pq5g.cli import main
from pq5g.core5g import gtpu_decap, gtpu_encap, read_dump
from pq5g.errors import FramingError
from pq5g.handshake.loopback import flip_byte, make_pair, run_handshake
from pq5g.handshake.machine import Role
from pq5g.kem import LEVELS, MLKEM
from pq5g.kem.hybrid import ALL_MODES
from pq5g.kem.kat import bundled_kat_path, load_rsp, verify
from pq5g.kem.poly import COMPRESS_WIDTHS, compress, decompress
from pq5g.kem._backend import kernels as default_kernels
from pq5g.reports import load_schema

NOW = 1_800_000_000
RESULTS: list[str] = []


@contextmanager
def criterion(name: str, capsys, budget_s: float | None = None):
    start = time.perf_counter()
    status, note = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget_s is not None and elapsed > budget_s:
            note = f" over budget {budget_s:.0f}s"
            raise AssertionError(f"{name} took {elapsed:.1f}s, budget {budget_s}s")
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        budget = f" / {budget_s:.0f}s" if budget_s is not None else ""
        line = f"ACCEPTANCE {status} {name} ({elapsed:.2f}s{budget}){note}"
        RESULTS.append(line)
        with capsys.disabled():
            print("\n" + line)


def test_kat_vectors(capsys):
    with criterion("kat: >=10 byte-exact vectors per op and level", capsys, budget_s=5):
        for level in LEVELS:
            report = verify(load_rsp(bundled_kat_path(level)), level)
            assert report.passed, report.failures[:3]
            for op in ("keygen", "encaps", "decaps"):
                assert sum(1 for c in report.checks if c.op == op and c.ok) >= 10, (level, op)


def test_kem_round_trip_and_implicit_rejection(capsys):
    with criterion("kem: 1000 round trips and 100 implicit rejections per level", capsys, budget_s=30):
        r = random.Random(2024)
        for level in LEVELS:
            kem = MLKEM(level)
            for _ in range(1000):
                ek, dk = kem.keygen(r.randbytes(64))
                ct, ss = kem.encaps(ek, r.randbytes(32))
                assert kem.decaps(dk, ct) == ss
            for _ in range(100):
                bad = bytearray(ct)
                bad[r.randrange(len(bad))] ^= r.randrange(1, 256)
                assert kem.decaps(dk, bytes(bad)) == oracles.implicit_rejection(dk[-32:], bytes(bad))


def test_ring_arithmetic(capsys):
    with criterion("ring: NTT product equals schoolbook; compress bound exhaustive", capsys):
        r = random.Random(7)
        k = default_kernels
        for _ in range(200):
            a = [r.randrange(oracles.Q) for _ in range(256)]
            b = [r.randrange(oracles.Q) for _ in range(256)]
            assert k.inv_ntt(k.multiply_ntts(k.ntt(a), k.ntt(b))) == oracles.schoolbook_negacyclic(a, b)
        for d in COMPRESS_WIDTHS:
            bound = oracles.compress_bound(d)
            for x in range(oracles.Q):
                y = compress(d, x)
                assert y == oracles.compress_exact(d, x)
                assert oracles.centered_distance(decompress(d, y), x) <= bound


def test_handshake_modes_and_schedule(capsys):
    with criterion("handshake: 6 modes agree on app secrets and match the HKDF oracle", capsys):
        for mode in ALL_MODES:
            client, server = make_pair(mode, now=NOW)
            log = run_handshake(client, server)
            assert client.connected and server.connected
            cs, ss = client.state.schedule, server.state.schedule
            assert (cs.client_app_traffic, cs.server_app_traffic) == (ss.client_app_traffic, ss.server_app_traffic)
            # rebuild both transcript hashes from the wire, decrypting with oracle-derived keys
            ch, sh = log[0].record[3:], log[1].record[3:]
            hello_hash = hashlib.sha256(ch + sh).digest()
            hs = oracles.tls13_schedule(client.state.shared_secret, hello_hash)
            key = oracles.expand_label(hs["server_hs_traffic"], "key", b"", 16)
            iv = oracles.expand_label(hs["server_hs_traffic"], "iv", b"", 12)
            flight = b""
            for seq, t in enumerate(log[2:5]):
                nonce = bytes(a ^ b for a, b in zip(iv, seq.to_bytes(12, "big")))
                flight += AESGCM(key).decrypt(nonce, t.record[3:], t.record[:3])[:-1]
            want = oracles.tls13_schedule(
                client.state.shared_secret, hello_hash, hashlib.sha256(ch + sh + flight).digest()
            )
            for name, value in want.items():
                assert getattr(cs, name) == value, (mode, name)


def test_tamper_every_byte(capsys):
    with criterion("tamper: every single-byte flip of every handshake record fails", capsys, budget_s=120):
        for mode in ALL_MODES:
            sizes = [len(t.record) for t in run_handshake(*make_pair(mode, now=NOW))]
            for index, size in enumerate(sizes):
                for pos in range(size):
                    client, server = make_pair(mode, now=NOW)
                    log = run_handshake(client, server, flip_byte(index, pos))
                    recipient = server if log[index].sender is Role.CLIENT else client
                    assert recipient.failed, (mode, index, pos)
                    assert not (client.connected and server.connected), (mode, index, pos)


def test_gtpu(capsys):
    with criterion("gtpu: golden frame, 1000 round trips, strict decap", capsys):
        golden = bytes.fromhex("30FF0002000000014142")
        assert gtpu_encap(1, b"AB") == golden == oracles.gtpu_frame(1, b"AB")
        r = random.Random(11)
        for _ in range(1000):
            teid, payload = r.getrandbits(32), r.randbytes(r.randrange(1500))
            assert gtpu_decap(gtpu_encap(teid, payload)) == (teid, payload)
        for bad in (b"\x50" + golden[1:], b"\x40" + golden[1:], golden[:-1], golden + b"!"):
            with pytest.raises(FramingError):
                gtpu_decap(bad)


def test_end_to_end(capsys, tmp_path):
    with criterion("e2e: demo succeeds for 12 (mode, level, role) runs in both topologies, ordered, "
                   "no plaintext on links", capsys, budget_s=60):
        schema = load_schema("demo_result")
        for dn in (False, True):
            for mode in ALL_MODES:
                for swap in (False, True):
                    tag = f"{'dn' if dn else 'local'}-{mode}-{'swap' if swap else 'plain'}"
                    run_dir = tmp_path / tag
                    message = os.urandom(24).hex()  # 48 random ASCII bytes on the wire
                    argv = ["demo", "--mode", mode.kind.value, "--level", str(mode.level), "--seed", "1",
                            "--message", message, "--dump-dir", str(run_dir), "-o", str(run_dir / "r.json")]
                    argv += ["--dn"] * dn + ["--swap"] * swap
                    code = main(argv)
                    capsys.readouterr()
                    doc = json.loads((run_dir / "r.json").read_text())
                    jsonschema.validate(doc, schema)
                    assert code == 0 and doc["success"], (tag, doc["error"])
                    assert doc["negotiated_mode"] == str(mode), tag
                    assert doc["ue1"]["role"] == ("server" if swap else "client"), tag
                    assert doc["ue1"]["order_violations"] == doc["ue2"]["order_violations"] == [], tag
                    assert (doc["network"]["dn_frames"] > 0) == dn, tag
                    payload = message.encode()
                    dumps = sorted(run_dir.glob("*.pq5gcap"))
                    assert dumps, tag
                    for path in dumps:
                        for _, frame in read_dump(path):
                            for i in range(len(payload) - 15):
                                assert payload[i : i + 16] not in frame, (tag, path.name)


def test_bench_smoke(capsys, tmp_path):
    with criterion("bench: --iters 10 over all modes, zero failures, schema-valid report", capsys):
        out = tmp_path / "bench.json"
        code = main(["bench", "--iters", "10", "-o", str(out)])
        capsys.readouterr()
        doc = json.loads(out.read_text())
        jsonschema.validate(doc, load_schema("bench_report"))
        assert code == 0 and doc["failures"] == 0
        assert {r["mode"] for r in doc["rows"]} == {str(m) for m in ALL_MODES}
        assert all(r["count"] == 10 for r in doc["rows"])
