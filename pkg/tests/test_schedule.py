from __future__ import annotations

import hashlib

import pytest

import oracles
from pq5g.handshake.schedule import (
    EMPTY_HASH,
    TranscriptHash,
    expand_label,
    finished_key,
    finished_mac,
    hkdf_expand,
    hkdf_extract,
    hkdf_label,
    key_schedule,
)

# RFC 5869 appendix A, test cases 1-3 (SHA-256)
RFC5869 = [
    (
        "0b" * 22,
        "000102030405060708090a0b0c",
        "f0f1f2f3f4f5f6f7f8f9",
        42,
        "077709362c2e32df0ddc3f0dc47bba6390b6c73bb50f9c3122ec844ad7c2b3e5",
        "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865",
    ),
    (
        bytes(range(0x00, 0x50)).hex(),
        bytes(range(0x60, 0xB0)).hex(),
        bytes(range(0xB0, 0x100)).hex(),
        82,
        "06a6b88c5853361a06104c9ceb35b45cef760014904671014a193f40c15fc244",
        "b11e398dc80327a1c8e7f78c596a49344f012eda2d4efad8a050cc4c19afa97c59045a99cac7827271cb41c65e590e09"
        "da3275600c2f09b8367793a9aca3db71cc30c58179ec3e87c14c01d5c1f3434f1d87",
    ),
    (
        "0b" * 22,
        "",
        "",
        42,
        "19ef24a32c717b167f33a91d6f648bdf96596776afdb6377ac434c1c293ccb04",
        "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8",
    ),
]


@pytest.mark.parametrize("ikm, salt, info, length, prk, okm", RFC5869)
def test_hkdf_rfc5869(ikm, salt, info, length, prk, okm):
    ikm, salt, info = bytes.fromhex(ikm), bytes.fromhex(salt), bytes.fromhex(info)
    got_prk = hkdf_extract(salt, ikm)
    assert got_prk.hex() == prk
    assert hkdf_expand(got_prk, info, length).hex() == okm
    assert oracles.hkdf(salt, ikm, info, length).hex() == okm


def test_hkdf_expand_length_limit():
    with pytest.raises(ValueError):
        hkdf_expand(bytes(32), b"", 255 * 32 + 1)


def test_hkdf_label_layout():
    label = hkdf_label("key", b"", 16)
    assert label == b"\x00\x10" + bytes([9]) + b"tls13 key" + b"\x00"


def test_expand_label_matches_oracle():
    secret = bytes(range(32))
    for label, ctx, n in [("key", b"", 16), ("iv", b"", 12), ("c hs traffic", bytes(32), 32)]:
        assert expand_label(secret, label, ctx, n) == oracles.expand_label(secret, label, ctx, n)


def test_early_secret_of_zero_ikm():
    # HKDF-Extract(0^32, 0^32), the well-known TLS 1.3 early secret without PSK
    early = oracles.hkdf_extract(bytes(32), bytes(32))
    assert early.hex() == "33ad0a1c607ec03b09e6cd9893680ce210adf300aa1f2660e1b22e10f170f92a"
    assert key_schedule(bytes(32), EMPTY_HASH).early_secret == early


@pytest.mark.parametrize("ikm_len", [32, 64])
def test_schedule_matches_hkdf_oracle(ikm_len):
    ikm = bytes(range(ikm_len))
    hello = hashlib.sha256(b"hello transcript").digest()
    fin = hashlib.sha256(b"finished transcript").digest()
    ours = key_schedule(ikm, hello).with_application(fin)
    want = oracles.tls13_schedule(ikm, hello, fin)
    for name, value in want.items():
        assert getattr(ours, name) == value, name


def test_schedule_zero_ikm_empty_transcript():
    ours = key_schedule(bytes(32), EMPTY_HASH)
    want = oracles.tls13_schedule(bytes(32), EMPTY_HASH)
    assert ours.handshake_secret == want["handshake_secret"]
    assert ours.client_hs_traffic == want["client_hs_traffic"]
    assert ours.client_hs_traffic != ours.server_hs_traffic


def test_transcript_flip_changes_every_traffic_secret():
    hello = bytearray(hashlib.sha256(b"x").digest())
    base = key_schedule(bytes(32), bytes(hello)).with_application(bytes(hello))
    hello[7] ^= 1
    other = key_schedule(bytes(32), bytes(hello)).with_application(bytes(hello))
    for name in ("client_hs_traffic", "server_hs_traffic", "client_app_traffic", "server_app_traffic"):
        assert getattr(base, name) != getattr(other, name)
        assert getattr(other, name) == oracles.tls13_schedule(bytes(32), bytes(hello), bytes(hello))[name]


def test_finished_mac_matches_oracle():
    secret, th = bytes(range(32)), hashlib.sha256(b"t").digest()
    assert finished_key(secret) == oracles.expand_label(secret, "finished", b"", 32)
    assert finished_mac(secret, th) == oracles.finished_verify_data(secret, th)


def test_transcript_hash_is_running_sha256():
    t = TranscriptHash()
    assert t.digest() == EMPTY_HASH
    t.update(b"abc")
    mid = t.digest()
    t.update(b"def")
    assert mid == hashlib.sha256(b"abc").digest()
    assert t.digest() == hashlib.sha256(b"abcdef").digest()
    assert t.length == 6
