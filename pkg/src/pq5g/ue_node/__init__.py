"""UE endpoints and the two-UE secure messaging workflow."""

from __future__ import annotations

from .node import CLIENT_PORT, TLS_PORT, Datagram, Failure, UeConfig, UeNode, swap_roles
from .transcript import (
    CLIENT_ORDER,
    SERVER_ORDER,
    STEP_TAGS,
    EventTranscript,
    TranscriptEntry,
    expected_order,
    first_missing_step,
    order_violations,
)
from .workflow import DemoResult, UeReport, default_configs, run_workflow
