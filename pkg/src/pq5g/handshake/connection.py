"""Sans-IO connection: drives the handshake state machine over framed records.

``receive()`` takes raw record bytes and returns the records to transmit.
Decrypted application data lands in :attr:`Connection.inbox`. Every failure
is converted into an alert record and a ``FAILED`` phase; nothing raises
out of ``receive()``.
"""

from __future__ import annotations

from collections import deque

from ..errors import FramingError, RecordError, StateError
from . import machine
from .machine import HandshakeError, HandshakeState, Phase, Role, ServerConfig
from .messages import Alert, ClientHello, ServerHello, decode_message, encode_message
from .record import ContentType, RecordKeys, frame_record, open_record, seal_record, split_records

MAX_FRAGMENT = 16384


class Connection:
    def __init__(self, role: Role, rng, *, modes=None, config: ServerConfig | None = None,
                 identity=None, trust_anchors=(), now=None, expected_peer=None):
        self.role = role
        self.rng = rng
        self.modes = list(modes or [])
        self.config = config
        self.identity = identity
        self.trust_anchors = list(trust_anchors)
        self.now = now
        self.expected_peer = expected_peer
        self.state: HandshakeState | None = None
        self.read_keys: RecordKeys | None = None
        self.write_keys: RecordKeys | None = None
        self.inbox: deque[bytes] = deque()
        self.alert: Alert | None = None
        self.error: str | None = None
        self._failed = False
        self._events: list[tuple[str, str]] = []
        self._seen_events = 0

    @classmethod
    def client(cls, modes, rng, identity, trust_anchors, now=None, expected_peer=None) -> "Connection":
        return cls(Role.CLIENT, rng, modes=modes, identity=identity, trust_anchors=trust_anchors,
                   now=now, expected_peer=expected_peer)

    @classmethod
    def server(cls, config: ServerConfig, rng) -> "Connection":
        return cls(Role.SERVER, rng, config=config)

    # -- status ----------------------------------------------------------

    @property
    def phase(self) -> Phase:
        if self._failed:
            return Phase.FAILED
        return self.state.phase if self.state else Phase.START

    @property
    def connected(self) -> bool:
        return self.phase is Phase.CONNECTED

    @property
    def failed(self) -> bool:
        return self.phase is Phase.FAILED

    @property
    def mode(self):
        return self.state.mode if self.state else None

    def drain_events(self) -> list[tuple[str, str]]:
        """Handshake step events emitted since the last call."""
        if self.state is not None:
            new = self.state.events[self._seen_events:]
            self._seen_events = len(self.state.events)
            self._events.extend(new)
        out, self._events = self._events, []
        return out

    # -- sending ---------------------------------------------------------

    def initiate(self) -> list[bytes]:
        if self.role is not Role.CLIENT or self.state is not None:
            raise StateError("only a fresh client connection can initiate")
        self.state, hello = machine.client_begin(
            self.modes, self.rng, self.identity, self.trust_anchors, self.now, self.expected_peer
        )
        return [frame_record(ContentType.HANDSHAKE, encode_message(hello))]

    def _protected(self, inner_type: int, payload: bytes) -> bytes:
        return seal_record(self.write_keys, inner_type, payload)

    def send(self, data: bytes) -> list[bytes]:
        if not self.connected:
            raise StateError(f"cannot send application data in phase {self.phase.name}")
        chunks = [data[i : i + MAX_FRAGMENT] for i in range(0, len(data), MAX_FRAGMENT)] or [b""]
        return [self._protected(ContentType.APPLICATION_DATA, c) for c in chunks]

    # -- receiving -------------------------------------------------------

    def receive(self, data: bytes) -> list[bytes]:
        if self._failed:
            return []
        out: list[bytes] = []
        try:
            for ctype, header, payload in split_records(data):
                out.extend(self._receive_record(ctype, header, payload))
                if self._failed:
                    break
        except HandshakeError as exc:
            return out + self._abort(exc.alert, str(exc))
        except FramingError as exc:
            return out + self._abort(Alert.ILLEGAL_PARAMETER, str(exc))
        except RecordError as exc:
            return out + self._abort(Alert.DECRYPT_ERROR, str(exc))
        return out

    def _abort(self, alert: Alert, message: str) -> list[bytes]:
        self._failed = True
        self.alert = alert
        self.error = message
        if self.state is not None and self.state.phase is not Phase.FAILED:
            self.state.fail(alert, message)
        return [frame_record(ContentType.ALERT, bytes([alert]))]

    def _receive_record(self, ctype: int, header: bytes, payload: bytes) -> list[bytes]:
        if ctype == ContentType.ALERT:
            if len(payload) != 1:
                raise FramingError("alert record must carry one byte")
            self._failed = True
            try:
                self.alert = Alert(payload[0])
            except ValueError:
                self.alert = None
            self.error = f"peer sent alert {payload[0]}"
            if self.state is not None and self.state.phase is not Phase.FAILED:
                self.state.phase = Phase.FAILED
                self.state.history.append(Phase.FAILED)
            return []
        if ctype == ContentType.HANDSHAKE:
            if self.read_keys is not None:
                raise FramingError("plaintext handshake record after keys were established")
            return self._on_handshake(payload)
        if self.read_keys is None:
            raise FramingError("protected record before keys were established")
        inner, plain = open_record(self.read_keys, header, payload)
        if inner == ContentType.HANDSHAKE:
            return self._on_handshake(plain)
        if inner == ContentType.APPLICATION_DATA:
            if not self.connected:
                raise FramingError("application data before the handshake completed")
            self.inbox.append(plain)
            return []
        raise FramingError(f"unexpected inner content type {inner}")

    def _on_handshake(self, wire: bytes) -> list[bytes]:
        msg = decode_message(wire)
        if self.role is Role.SERVER:
            if self.state is None:
                if not isinstance(msg, ClientHello):
                    raise FramingError("server expects a ClientHello first")
                return self._server_reply(msg)
        elif self.state is None:
            raise FramingError("client received handshake data before initiating")
        if self.role is Role.CLIENT and isinstance(msg, ServerHello):
            machine.client_receive_server_hello(self.state, msg)
            self.read_keys = RecordKeys.from_secret(self.state.schedule.server_hs_traffic)
            self.write_keys = RecordKeys.from_secret(self.state.schedule.client_hs_traffic)
            return []
        machine.receive(self.state, msg)
        st = self.state
        if self.role is Role.CLIENT and st.peer_finished_verified and not st.own_finished_sent:
            return self._client_flight()
        if self.role is Role.SERVER and st.phase is Phase.CONNECTED:
            self.read_keys = RecordKeys.from_secret(st.schedule.client_app_traffic)
        return []

    def _server_reply(self, hello: ClientHello) -> list[bytes]:
        try:
            self.state, reply = machine.server_respond(hello, self.config, self.rng)
        except HandshakeError as exc:
            self.state = exc.state
            raise
        st = self.state
        out = [frame_record(ContentType.HANDSHAKE, encode_message(reply))]
        self.write_keys = RecordKeys.from_secret(st.schedule.server_hs_traffic)
        self.read_keys = RecordKeys.from_secret(st.schedule.client_hs_traffic)
        for msg in (machine.send_certificate(st), machine.send_certificate_verify(st), machine.send_finished(st)):
            out.append(self._protected(ContentType.HANDSHAKE, encode_message(msg)))
        self.write_keys = RecordKeys.from_secret(st.schedule.server_app_traffic)
        return out

    def _client_flight(self) -> list[bytes]:
        st = self.state
        out = [
            self._protected(ContentType.HANDSHAKE, encode_message(machine.send_certificate(st))),
            self._protected(ContentType.HANDSHAKE, encode_message(machine.send_certificate_verify(st))),
            self._protected(ContentType.HANDSHAKE, encode_message(machine.send_finished(st))),
        ]
        self.read_keys = RecordKeys.from_secret(st.schedule.server_app_traffic)
        self.write_keys = RecordKeys.from_secret(st.schedule.client_app_traffic)
        return out
