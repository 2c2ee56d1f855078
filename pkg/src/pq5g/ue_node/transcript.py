"""Ordered per-UE record of workflow steps, and the order each role must follow."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

STEP_TAGS = (
    "Registered",
    "SessionEstablished",
    "KeypairGenerated",
    "HelloSent",
    "HelloReceived",
    "SecretEncapsulated",
    "SecretDecapsulated",
    "ScheduleDerived",
    "CertificatesVerified",
    "HandshakeComplete",
    "MessageSent",
    "MessageReceived",
)

CLIENT_ORDER = (
    "Registered",
    "SessionEstablished",
    "KeypairGenerated",
    "HelloSent",
    "HelloReceived",
    "SecretDecapsulated",
    "ScheduleDerived",
    "CertificatesVerified",
    "HandshakeComplete",
    "MessageSent",
    "MessageReceived",
)

# The server answers its hello only after encapsulating, and replies to the
# client's message. Its key-pair step is the X25519 share, so it is absent
# when the server offers conventional modes only.
SERVER_ORDER = (
    "Registered",
    "SessionEstablished",
    "KeypairGenerated",
    "HelloReceived",
    "SecretEncapsulated",
    "ScheduleDerived",
    "HelloSent",
    "CertificatesVerified",
    "HandshakeComplete",
    "MessageReceived",
    "MessageSent",
)
OPTIONAL = {"server": frozenset({"KeypairGenerated"}), "client": frozenset()}


def expected_order(role: str) -> tuple[str, ...]:
    if role == "client":
        return CLIENT_ORDER
    if role == "server":
        return SERVER_ORDER
    raise ValueError(f"unknown role {role!r}")


@dataclass(frozen=True)
class TranscriptEntry:
    tag: str
    timestamp_ns: int
    detail: str = ""


@dataclass
class EventTranscript:
    entries: list[TranscriptEntry] = field(default_factory=list)

    def add(self, tag: str, detail: str = "") -> None:
        if tag not in STEP_TAGS:
            raise ValueError(f"unknown step tag {tag!r}")
        self.entries.append(TranscriptEntry(tag, time.monotonic_ns(), detail))

    @property
    def tags(self) -> list[str]:
        return [e.tag for e in self.entries]

    def __contains__(self, tag: str) -> bool:
        return tag in self.tags

    def __len__(self) -> int:
        return len(self.entries)

    def without_timestamps(self) -> list[tuple[str, str]]:
        return [(e.tag, e.detail) for e in self.entries]

    def to_list(self) -> list[dict]:
        return [{"tag": e.tag, "timestamp_ns": e.timestamp_ns, "detail": e.detail} for e in self.entries]


def order_violations(transcript: EventTranscript, role: str, complete: bool = True) -> list[str]:
    """Empty iff first occurrences follow the role's order (and, with ``complete``, all required steps appear)."""
    order = expected_order(role)
    rank = {tag: i for i, tag in enumerate(order)}
    problems = []
    seen: list[str] = []
    for tag in transcript.tags:
        if tag not in rank:
            problems.append(f"{tag} is not a {role} step")
        elif tag not in seen:
            seen.append(tag)
    ranks = [rank[t] for t in seen if t in rank]
    for a, b in zip(ranks, ranks[1:]):
        if b < a:
            problems.append(f"{order[b]} after {order[a]}")
    missing = [t for t in order if t not in seen and t not in OPTIONAL[role]]
    if complete and missing:
        problems.append("missing " + ", ".join(missing))
    return problems


def first_missing_step(transcript: EventTranscript, role: str) -> str | None:
    for tag in expected_order(role):
        if tag not in transcript and tag not in OPTIONAL[role]:
            return tag
    return None
