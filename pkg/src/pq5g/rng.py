"""Seeded randomness threading.

Every randomness consumer takes an object with ``randbytes(n)``. A master
seed fans out into independent, labelled ``random.Random`` streams so runs
replay exactly; without a seed, ``random.SystemRandom`` (os.urandom) is used.
"""

from __future__ import annotations

import hashlib
import random


def derive_rng(seed: int | bytes | None, label: str) -> random.Random:
    if seed is None:
        return random.SystemRandom()
    if isinstance(seed, int):
        seed = seed.to_bytes(16, "big", signed=True)
    digest = hashlib.sha256(seed + b"/" + label.encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))
