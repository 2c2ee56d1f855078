"""AMF: subscriber registry, nonce/HMAC registration, and N1/N2 relay toward the SMF."""

from __future__ import annotations

import hashlib
import hmac
import ipaddress

from ..errors import FramingError, RegistrationReject
from .net import Node
from .packets import Msg, control, parse_control
from .state import RegState, UeContext
from .topology import SubscriberRecord

NONCE_LEN = 32


def auth_response(k: bytes, nonce: bytes) -> bytes:
    return hmac.new(k, nonce, hashlib.sha256).digest()


class SubscriberRegistry:
    def __init__(self, subscribers=()):
        self.records: dict[str, SubscriberRecord] = {}
        self.contexts: dict[str, UeContext] = {}
        self.nonces: dict[str, bytes] = {}
        for s in subscribers:
            self.add(s)

    def add(self, record: SubscriberRecord) -> None:
        if record.supi in self.records:
            raise ValueError(f"duplicate subscriber {record.supi}")
        self.records[record.supi] = record

    def context(self, supi: str) -> UeContext:
        return self.contexts.setdefault(supi, UeContext(supi))

    def issue_nonce(self, supi: str, rng) -> bytes:
        record = self.records.get(supi)
        if record is None:
            raise RegistrationReject("unknown_subscriber", supi)
        if not record.allowed:
            raise RegistrationReject("not_allowed", supi)
        nonce = rng.randbytes(NONCE_LEN)
        self.nonces[supi] = nonce
        return nonce


def register_ue(registry: SubscriberRegistry, supi: str, response: bytes, nonce: bytes) -> UeContext:
    record = registry.records.get(supi)
    if record is None:
        raise RegistrationReject("unknown_subscriber", supi)
    if not record.allowed:
        raise RegistrationReject("not_allowed", supi)
    issued = registry.nonces.pop(supi, None)  # one-shot
    if issued is None or not hmac.compare_digest(issued, nonce):
        raise RegistrationReject("auth_failure", supi)
    if not hmac.compare_digest(auth_response(record.k, nonce), response):
        raise RegistrationReject("auth_failure", supi)
    ctx = registry.context(supi)
    ctx.reg_state = RegState.REGISTERED
    return ctx


class Amf(Node):
    kind = "amf"

    def __init__(self, registry: SubscriberRegistry, rng, smf_id: str = "smf", node_id: str = "amf"):
        super().__init__(node_id)
        self.registry = registry
        self.rng = rng
        self.smf_id = smf_id
        self.serving_gnb: dict[str, str] = {}

    def handle(self, src: str, data: bytes) -> None:
        try:
            msg, body = parse_control(data)
            if not isinstance(body, dict) or "supi" not in body:
                raise FramingError("control message without supi")
        except FramingError as exc:
            self.log("Dropped", f"from {src}: {exc}")
            return
        supi = str(body["supi"])
        if src == self.smf_id:
            self._from_smf(msg, supi, body, data)
        else:
            self._from_gnb(src, msg, supi, body)

    def _reject(self, gnb: str, exc: RegistrationReject) -> None:
        self.log("RegistrationRejected", f"{exc.supi}: {exc.cause}")
        self.send(gnb, control(Msg.REGISTRATION_REJECT, supi=exc.supi, cause=exc.cause))

    def _from_gnb(self, gnb: str, msg: Msg, supi: str, body: dict) -> None:
        self.serving_gnb[supi] = gnb
        if msg is Msg.REGISTRATION_REQUEST:
            try:
                nonce = self.registry.issue_nonce(supi, self.rng)
            except RegistrationReject as exc:
                return self._reject(gnb, exc)
            self.send(gnb, control(Msg.AUTH_CHALLENGE, supi=supi, nonce=nonce.hex()))
        elif msg is Msg.AUTH_RESPONSE:
            try:
                response = bytes.fromhex(body.get("response", ""))
                nonce = bytes.fromhex(body.get("nonce", ""))
            except (TypeError, ValueError):
                response, nonce = b"", b""
            try:
                register_ue(self.registry, supi, response, nonce)
            except RegistrationReject as exc:
                return self._reject(gnb, exc)
            self.log("RegistrationAccepted", supi)
            self.send(gnb, control(Msg.REGISTRATION_ACCEPT, supi=supi))
        elif msg is Msg.PDU_SESSION_REQUEST:
            ctx = self.registry.context(supi)
            self.send(self.smf_id, control(
                Msg.N11_CREATE_SESSION, supi=supi, session_id=int(body.get("session_id", 1)),
                gnb=gnb, reg_state=ctx.reg_state.value,
            ))
        else:
            self.log("Dropped", f"unexpected {msg.name} from {gnb}")

    def _from_smf(self, msg: Msg, supi: str, body: dict, data: bytes) -> None:
        gnb = self.serving_gnb.get(supi)
        if gnb is None:
            self.log("Dropped", f"{msg.name} for {supi} with no serving gNB")
            return
        if msg is Msg.PDU_SESSION_ACCEPT:
            self.registry.context(supi).ue_ip = ipaddress.IPv4Address(body["ue_ip"])
            self.send(gnb, data)
        elif msg is Msg.PDU_SESSION_REJECT:
            self.send(gnb, data)
        else:
            self.log("Dropped", f"unexpected {msg.name} from SMF")
