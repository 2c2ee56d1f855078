from __future__ import annotations

import random

import pytest

from pq5g.errors import FramingError, RecordError
from pq5g.handshake.record import (
    SEQ_LIMIT,
    ContentType,
    RecordKeys,
    frame_record,
    open_record,
    record_open,
    record_seal,
    seal_record,
    split_records,
)


def keys_pair(secret=bytes(range(32))):
    return RecordKeys.from_secret(secret), RecordKeys.from_secret(secret)


def test_key_and_iv_lengths():
    k = RecordKeys.from_secret(bytes(32))
    assert len(k.aead_key) == 16 and len(k.iv) == 12 and k.seq == 0


def test_seal_open_round_trip_1000():
    r = random.Random(1)
    tx, rx = keys_pair()
    for _ in range(1000):
        m, aad = r.randbytes(r.randrange(0, 300)), r.randbytes(5)
        assert record_open(rx, record_seal(tx, m, aad), aad) == m
    assert tx.seq == rx.seq == 1000


def test_flipped_bit_fails_without_output():
    tx, rx = keys_pair()
    ct = bytearray(record_seal(tx, b"secret message", b"hdr"))
    ct[3] ^= 0x10
    with pytest.raises(RecordError):
        record_open(rx, bytes(ct), b"hdr")
    assert rx.seq == 0


def test_wrong_aad_fails():
    tx, rx = keys_pair()
    ct = record_seal(tx, b"m", b"aad1")
    with pytest.raises(RecordError):
        record_open(rx, ct, b"aad2")


def test_nonces_differ_only_by_sequence_xor():
    k = RecordKeys.from_secret(bytes(32))
    n0 = k.nonce()
    record_seal(k, b"a", b"")
    n1 = k.nonce()
    assert n0 == k.iv
    diff = bytes(a ^ b for a, b in zip(n0, n1))
    assert diff == (1).to_bytes(12, "big")


def test_nonce_never_repeats():
    k = RecordKeys.from_secret(bytes(32))
    seen = set()
    for _ in range(500):
        seen.add(k.nonce())
        record_seal(k, b"", b"")
    assert len(seen) == 500


def test_sequence_limit_aborts():
    k = RecordKeys.from_secret(bytes(32))
    k.seq = SEQ_LIMIT
    with pytest.raises(RecordError):
        record_seal(k, b"x", b"")


def test_record_framing():
    rec = frame_record(ContentType.HANDSHAKE, b"abc")
    assert rec == b"\x16\x00\x03abc"
    both = rec + frame_record(ContentType.ALERT, b"\x28")
    assert [(t, p) for t, _, p in split_records(both)] == [(22, b"abc"), (21, b"\x28")]


@pytest.mark.parametrize("bad", [b"\x16\x00", b"\x16\x00\x05abc", b"\x99\x00\x01a"])
def test_split_records_is_strict(bad):
    with pytest.raises(FramingError):
        split_records(bad)


def test_protected_record_hides_type_and_binds_header():
    tx, rx = keys_pair()
    rec = seal_record(tx, ContentType.HANDSHAKE, b"hello")
    assert rec[0] == ContentType.APPLICATION_DATA
    (ctype, header, payload), = split_records(rec)
    assert open_record(rx, header, payload) == (ContentType.HANDSHAKE, b"hello")
