"""TLS-1.3-style handshake with ML-KEM key exchange, certificates and an AEAD record layer."""

from .certs import CertificateAuthority, Certificate, CertVerdict, Identity, TrustAnchor, validate_certificate
from .connection import Connection
from .machine import (
    HandshakeError,
    HandshakeState,
    Phase,
    Role,
    ServerConfig,
    client_begin,
    client_receive_server_hello,
    derive_schedule,
    receive,
    send_certificate,
    send_certificate_verify,
    send_finished,
    server_respond,
    verify_finished,
)
from .messages import Alert, CertificateMsg, CertificateVerify, ClientHello, Finished, KeyShare, ServerHello
from .record import RecordKeys, record_open, record_seal
from .schedule import KeySchedule, TranscriptHash, expand_label, hkdf_expand, hkdf_extract, key_schedule
