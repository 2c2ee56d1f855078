"""TLS-1.3-style handshake state machine with KEM key exchange and mutual certificates.

Message flow (``{}`` = protected with handshake traffic keys)::

    Client                                  Server
    ClientHello        -------->
                                            ServerHello
                       <--------            {Certificate, CertificateVerify, Finished}
    {Certificate, CertificateVerify, Finished}  -------->

Each step is a function mutating a :class:`HandshakeState`. Any failure
moves the state to ``FAILED``, records the alert and raises
:class:`HandshakeError`.
"""

from __future__ import annotations

import enum
import hmac
import time
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PublicKey
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey

from ..errors import ConfigurationError, EncapsulationError, ParameterError, Pq5gError, StateError
from ..kem.hybrid import KemMode, hybrid_combine, x25519_keypair, x25519_public, x25519_shared
from ..kem.keys import DecapsKey, EncapsKey, KemCiphertext, decaps, encaps, keygen
from .certs import CertVerdict, Identity, TrustAnchor, validate_certificate
from .messages import (
    RANDOM_LEN,
    Alert,
    CertificateMsg,
    CertificateVerify,
    ClientHello,
    Finished,
    HandshakeMessage,
    HandshakeType,
    KeyShare,
    ServerHello,
    encode_message,
)
from .schedule import KeySchedule, TranscriptHash, finished_mac, key_schedule


class Role(enum.Enum):
    CLIENT = "client"
    SERVER = "server"


class Phase(enum.IntEnum):
    START = 0
    SENT_HELLO = 1
    EXCHANGED_KEYS = 2
    AUTH_PENDING = 3
    CONNECTED = 4
    FAILED = 99


class HandshakeError(Pq5gError):
    def __init__(self, alert: Alert, message: str, state: "HandshakeState | None" = None):
        super().__init__(f"{alert.label}: {message}")
        self.alert = alert
        self.state = state


_CV_CONTEXT = {
    Role.SERVER: b"TLS 1.3, server CertificateVerify",
    Role.CLIENT: b"TLS 1.3, client CertificateVerify",
}


def _cv_payload(signer: Role, transcript_hash: bytes) -> bytes:
    return b"\x20" * 64 + _CV_CONTEXT[signer] + b"\x00" + transcript_hash


@dataclass
class ServerConfig:
    preferences: list[KemMode]
    identity: Identity | None = None
    trust_anchors: list[TrustAnchor] = field(default_factory=list)
    now: int | None = None
    expected_peer: str | None = None
    classical_key: X25519PrivateKey | None = None


@dataclass
class HandshakeState:
    role: Role
    identity: Identity | None = None
    trust_anchors: list[TrustAnchor] = field(default_factory=list)
    now: int | None = None
    expected_peer: str | None = None
    phase: Phase = Phase.START
    mode: KemMode | None = None
    transcript: TranscriptHash = field(default_factory=TranscriptHash)
    schedule: KeySchedule | None = None
    peer_certificate: object | None = None
    alert: Alert | None = None
    history: list[Phase] = field(default_factory=lambda: [Phase.START])
    events: list[tuple[str, str]] = field(default_factory=list)
    # ephemeral client material, one entry per offered mode
    kem_keys: dict = field(default_factory=dict, repr=False)
    hello_hash: bytes | None = None
    shared_secret: bytes | None = field(default=None, repr=False)
    peer_cert_verified: bool = False
    peer_cv_verified: bool = False
    peer_finished_verified: bool = False
    own_cv_sent: bool = False
    own_finished_sent: bool = False

    @property
    def peer_role(self) -> Role:
        return Role.SERVER if self.role is Role.CLIENT else Role.CLIENT

    @property
    def clock(self) -> int:
        return int(time.time()) if self.now is None else self.now

    def advance(self, phase: Phase) -> None:
        if self.phase is Phase.FAILED:
            raise StateError("handshake already failed")
        if phase < self.phase:
            raise StateError(f"phase {self.phase.name} cannot move back to {phase.name}")
        if phase is Phase.CONNECTED and not (self.peer_finished_verified and self.peer_cert_verified):
            raise StateError("Connected requires a verified peer Finished and certificate")
        self.phase = phase
        if self.history[-1] is not phase:
            self.history.append(phase)

    def fail(self, alert: Alert, message: str) -> HandshakeError:
        self.phase = Phase.FAILED
        self.alert = alert
        self.history.append(Phase.FAILED)
        return HandshakeError(alert, message, self)

    def record(self, message: HandshakeMessage) -> bytes:
        wire = encode_message(message)
        self.transcript.update(wire)
        return wire

    def log(self, tag: str, detail: str = "") -> None:
        self.events.append((tag, detail))


def _require_live(state: HandshakeState) -> None:
    if state.phase is Phase.FAILED:
        raise StateError("handshake already failed")


# -- ClientHello / ServerHello -----------------------------------------------


def client_begin(
    modes,
    rng,
    identity: Identity | None = None,
    trust_anchors=(),
    now: int | None = None,
    expected_peer: str | None = None,
) -> tuple[HandshakeState, ClientHello]:
    modes = list(modes)
    if not modes:
        raise ConfigurationError("client must offer at least one KEM mode")
    if len(set(modes)) != len(modes):
        raise ConfigurationError("duplicate KEM mode in offer (one key share per mode)")
    state = HandshakeState(Role.CLIENT, identity, list(trust_anchors), now, expected_peer)
    shares = []
    for mode in modes:
        ek, dk = keygen(mode.params, rng.randbytes(64))
        classical_priv, classical_pub = None, b""
        if mode.is_hybrid:
            classical_priv, classical_pub = x25519_keypair(rng.randbytes(32))
        state.kem_keys[mode] = (dk, classical_priv)
        shares.append(KeyShare(mode, ek.data, classical_pub))
        state.log("KeypairGenerated", f"{mode}: ek {len(ek)} bytes" + (", x25519 32 bytes" if mode.is_hybrid else ""))
    hello = ClientHello(rng.randbytes(RANDOM_LEN), tuple(modes), tuple(shares))
    state.record(hello)
    state.advance(Phase.SENT_HELLO)
    state.log("HelloSent", "ClientHello offering " + ",".join(str(m) for m in modes))
    return state, hello


def derive_schedule(state: HandshakeState, ikm: bytes, transcript_at_hello: bytes) -> KeySchedule:
    if state.mode is None or state.phase is Phase.FAILED:
        raise StateError("key schedule requested before the key exchange completed")
    state.shared_secret = ikm
    state.hello_hash = transcript_at_hello
    state.schedule = key_schedule(ikm, transcript_at_hello)
    state.log("ScheduleDerived", f"handshake traffic secrets for {state.mode}")
    return state.schedule


def _select_mode(preferences, hello: ClientHello) -> KemMode | None:
    shared = {s.mode for s in hello.key_shares}
    return next((m for m in preferences if m in shared), None)


def server_respond(hello: ClientHello, config: ServerConfig, rng) -> tuple[HandshakeState, ServerHello]:
    state = HandshakeState(
        Role.SERVER, config.identity, list(config.trust_anchors), config.now, config.expected_peer
    )
    state.record(hello)
    state.log("HelloReceived", "ClientHello offering " + ",".join(str(m) for m in hello.offered_modes))
    mode = _select_mode(config.preferences, hello)
    if mode is None:
        raise state.fail(Alert.HANDSHAKE_FAILURE, "no mutually supported KEM mode")
    state.mode = mode
    share = next(s for s in hello.key_shares if s.mode == mode)
    try:
        ct, pq_ss = encaps(EncapsKey(mode.params, share.kem_part), rng.randbytes(32))
    except EncapsulationError as exc:
        raise state.fail(Alert.ILLEGAL_PARAMETER, f"malformed encapsulation key: {exc}") from None
    state.log("SecretEncapsulated", f"{mode}: ciphertext {len(ct)} bytes")
    classical_ss, classical_pub = None, b""
    if mode.is_hybrid:
        priv = config.classical_key
        if priv is None:
            priv, _ = x25519_keypair(rng.randbytes(32))
        classical_pub = x25519_public(priv)
        try:
            classical_ss = x25519_shared(priv, share.classical_part)
        except ParameterError as exc:
            raise state.fail(Alert.ILLEGAL_PARAMETER, str(exc)) from None
    reply = ServerHello(rng.randbytes(RANDOM_LEN), mode, KeyShare(mode, ct.data, classical_pub))
    state.record(reply)
    derive_schedule(state, hybrid_combine(mode, pq_ss, classical_ss), state.transcript.digest())
    state.advance(Phase.EXCHANGED_KEYS)
    state.log("HelloSent", f"ServerHello selecting {mode}")
    return state, reply


def client_receive_server_hello(state: HandshakeState, hello: ServerHello) -> KeySchedule:
    _require_live(state)
    if state.role is not Role.CLIENT or state.phase is not Phase.SENT_HELLO:
        raise state.fail(Alert.ILLEGAL_PARAMETER, "unexpected ServerHello")
    mode = hello.selected_mode
    if mode not in state.kem_keys:
        raise state.fail(Alert.ILLEGAL_PARAMETER, f"server selected {mode}, which was not offered")
    state.mode = mode
    state.record(hello)
    state.log("HelloReceived", f"ServerHello selecting {mode}")
    dk, classical_priv = state.kem_keys[mode]
    # Implicit rejection: a corrupted ciphertext still yields a (wrong) secret here.
    pq_ss = decaps(dk, KemCiphertext(mode.params, hello.key_share.kem_part))
    state.log("SecretDecapsulated", f"{mode}: shared secret 32 bytes")
    classical_ss = None
    if mode.is_hybrid:
        try:
            classical_ss = x25519_shared(classical_priv, hello.key_share.classical_part)
        except ParameterError as exc:
            raise state.fail(Alert.ILLEGAL_PARAMETER, str(exc)) from None
    state.kem_keys = {}
    schedule = derive_schedule(state, hybrid_combine(mode, pq_ss, classical_ss), state.transcript.digest())
    state.advance(Phase.EXCHANGED_KEYS)
    return schedule


# -- authentication -------------------------------------------------------------


def send_certificate(state: HandshakeState) -> CertificateMsg:
    _require_live(state)
    if state.schedule is None:
        raise StateError("certificate sent before key exchange")
    if state.identity is None:
        raise StateError("no identity configured")
    msg = CertificateMsg(state.identity.certificate)
    state.record(msg)
    return msg


def send_certificate_verify(state: HandshakeState) -> CertificateVerify:
    _require_live(state)
    if state.identity is None or state.schedule is None:
        raise StateError("CertificateVerify needs an identity and a key schedule")
    sig = state.identity.signing_key.sign(_cv_payload(state.role, state.transcript.digest()))
    msg = CertificateVerify(sig)
    state.record(msg)
    state.own_cv_sent = True
    return msg


def receive_certificate(state: HandshakeState, msg: CertificateMsg) -> None:
    _require_live(state)
    if state.phase not in (Phase.EXCHANGED_KEYS, Phase.AUTH_PENDING) or state.peer_certificate is not None:
        raise state.fail(Alert.ILLEGAL_PARAMETER, "unexpected Certificate")
    cert = msg.certificate
    verdict = validate_certificate(cert, state.trust_anchors, state.clock)
    if verdict is not CertVerdict.ACCEPT:
        raise state.fail(Alert.CERTIFICATE_ERROR, f"peer certificate rejected: {verdict.value}")
    if state.expected_peer is not None and cert.subject_id != state.expected_peer:
        raise state.fail(Alert.CERTIFICATE_ERROR, f"certificate subject {cert.subject_id!r} is not the expected peer")
    state.record(msg)
    state.peer_certificate = cert


def receive_certificate_verify(state: HandshakeState, msg: CertificateVerify) -> None:
    _require_live(state)
    if state.peer_certificate is None or state.peer_cv_verified:
        raise state.fail(Alert.ILLEGAL_PARAMETER, "unexpected CertificateVerify")
    payload = _cv_payload(state.peer_role, state.transcript.digest())
    try:
        Ed25519PublicKey.from_public_bytes(state.peer_certificate.subject_sig_pubkey).verify(msg.signature, payload)
    except (InvalidSignature, ValueError):
        raise state.fail(Alert.DECRYPT_ERROR, "CertificateVerify signature invalid") from None
    state.record(msg)
    state.peer_cv_verified = True
    state.peer_cert_verified = True
    state.log("CertificatesVerified", f"peer {state.peer_certificate.subject_id} issued by {state.peer_certificate.issuer_id}")
    state.advance(Phase.AUTH_PENDING)


def _own_secret(state: HandshakeState) -> bytes:
    s = state.schedule
    return s.client_hs_traffic if state.role is Role.CLIENT else s.server_hs_traffic


def _peer_secret(state: HandshakeState) -> bytes:
    s = state.schedule
    return s.server_hs_traffic if state.role is Role.CLIENT else s.client_hs_traffic


def send_finished(state: HandshakeState) -> Finished:
    _require_live(state)
    if state.schedule is None:
        raise StateError("Finished requested before the key schedule exists")
    if state.identity is not None and not state.own_cv_sent:
        raise StateError("Finished requested before own CertificateVerify")
    if state.role is Role.CLIENT and not (state.peer_finished_verified and state.peer_cert_verified):
        raise StateError("client Finished requires the server to be authenticated first")
    msg = Finished(finished_mac(_own_secret(state), state.transcript.digest()))
    state.record(msg)
    state.own_finished_sent = True
    if state.role is Role.SERVER:
        state.schedule = state.schedule.with_application(state.transcript.digest())
        state.advance(Phase.AUTH_PENDING)
    else:
        state.advance(Phase.CONNECTED)
        state.log("HandshakeComplete", f"{state.mode} channel established")
    return msg


def verify_finished(state: HandshakeState, msg: Finished) -> HandshakeState:
    _require_live(state)
    if not state.peer_cv_verified or state.peer_finished_verified:
        raise state.fail(Alert.ILLEGAL_PARAMETER, "unexpected Finished")
    expected = finished_mac(_peer_secret(state), state.transcript.digest())
    if not hmac.compare_digest(expected, msg.verify_data):
        raise state.fail(Alert.DECRYPT_ERROR, "Finished verify_data mismatch")
    state.record(msg)
    state.peer_finished_verified = True
    if state.role is Role.CLIENT:
        state.schedule = state.schedule.with_application(state.transcript.digest())
    else:
        if not state.own_finished_sent:
            raise state.fail(Alert.ILLEGAL_PARAMETER, "client Finished before server Finished")
        state.advance(Phase.CONNECTED)
        state.log("HandshakeComplete", f"{state.mode} channel established")
    return state


def receive(state: HandshakeState, msg: HandshakeMessage) -> None:
    """Dispatch one post-hello message in the order the role expects."""
    _require_live(state)
    if isinstance(msg, ServerHello):
        client_receive_server_hello(state, msg)
    elif isinstance(msg, CertificateMsg):
        if state.schedule is None:
            raise state.fail(Alert.ILLEGAL_PARAMETER, "Certificate before key exchange")
        receive_certificate(state, msg)
    elif isinstance(msg, CertificateVerify):
        receive_certificate_verify(state, msg)
    elif isinstance(msg, Finished):
        verify_finished(state, msg)
    else:
        raise state.fail(Alert.ILLEGAL_PARAMETER, f"unexpected {HandshakeType(msg.msg_type).name}")
