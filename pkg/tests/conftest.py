from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pq5g.kem._backend import available_backends  # noqa: E402

BACKENDS = available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def kernels(request):
    """Each test using this runs once per importable kernel backend."""
    return BACKENDS[request.param]


@pytest.fixture
def rng():
    return random.Random(0x5EED)


FIXED_NOW = 1_800_000_000


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
