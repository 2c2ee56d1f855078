"""Versioned JSON schemas for every machine-readable output."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

SCHEMAS = ("topology", "demo_result", "bench_report", "kat_report", "fuzz_report")


@lru_cache(maxsize=None)
def load_schema(name: str, version: int = 1) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"no schema named {name!r}")
    text = resources.files("pq5g").joinpath("schemas", f"{name}.v{version}.json").read_text()
    return json.loads(text)
