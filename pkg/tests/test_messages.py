from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from pq5g.errors import FramingError
from pq5g.kem.hybrid import ALL_MODES, KemMode
from pq5g.handshake.messages import (
    ClientHello,
    CertificateVerify,
    Finished,
    HandshakeType,
    KeyShare,
    ServerHello,
    decode_message,
    encode_message,
)


def share_for(mode: KemMode, fill: int = 1) -> KeyShare:
    classical = bytes([fill]) * 32 if mode.is_hybrid else b""
    return KeyShare(mode, bytes([fill]) * mode.params.ek_len, classical)


@pytest.mark.parametrize("mode", ALL_MODES, ids=str)
def test_client_hello_round_trip(mode):
    hello = ClientHello(bytes(32), (mode,), (share_for(mode),))
    wire = encode_message(hello)
    assert wire[0] == HandshakeType.CLIENT_HELLO
    assert int.from_bytes(wire[1:4], "big") == len(wire) - 4
    back = decode_message(wire)
    assert back == hello and encode_message(back) == wire


def test_client_hello_layout():
    mode = KemMode.conventional(512)
    wire = encode_message(ClientHello(bytes(range(32)), (mode,), (share_for(mode),)))
    body = wire[4:]
    assert body[:32] == bytes(range(32))
    assert body[32] == 1 and body[33:35] == mode.code.to_bytes(2, "big")
    assert body[35] == 1 and body[36:38] == mode.code.to_bytes(2, "big")
    assert int.from_bytes(body[38:40], "big") == 800
    assert body[-1] == 0  # empty classical vec8


@pytest.mark.parametrize("mode", ALL_MODES, ids=str)
def test_server_hello_round_trip(mode):
    classical = bytes(32) if mode.is_hybrid else b""
    hello = ServerHello(bytes(32), mode, KeyShare(mode, bytes(mode.params.ct_len), classical))
    assert decode_message(encode_message(hello)) == hello


def test_server_hello_wrong_ciphertext_length():
    mode = KemMode.conventional(768)
    bad = ServerHello(bytes(32), mode, KeyShare(mode, bytes(1087), b""))
    with pytest.raises(FramingError):
        decode_message(encode_message(bad))


def test_client_hello_rejects_share_for_unoffered_mode():
    a, b = KemMode.conventional(512), KemMode.conventional(768)
    with pytest.raises(FramingError):
        decode_message(encode_message(ClientHello(bytes(32), (a,), (share_for(b),))))


def test_client_hello_rejects_missing_classical_part():
    mode = KemMode.hybrid(512)
    bad = ClientHello(bytes(32), (mode,), (KeyShare(mode, bytes(800), b""),))
    with pytest.raises(FramingError):
        decode_message(encode_message(bad))


def test_finished_and_cv():
    f = Finished(bytes(range(32)))
    assert decode_message(encode_message(f)) == f
    cv = CertificateVerify(bytes(64))
    assert decode_message(encode_message(cv)) == cv
    with pytest.raises(FramingError):
        Finished.parse(bytes(31))


@pytest.mark.parametrize("wire", [b"", b"\x14\x00\x00", b"\x63\x00\x00\x00", b"\x14\x00\x00\x21" + bytes(32)])
def test_bad_framing(wire):
    with pytest.raises(FramingError):
        decode_message(wire)


@given(st.binary(max_size=256))
def test_decoder_never_crashes(data):
    try:
        msg = decode_message(data)
    except FramingError:
        return
    assert encode_message(msg) == data
