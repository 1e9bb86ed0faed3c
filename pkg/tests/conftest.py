import numpy as np
import pytest

from bitcov.sampling import SeedSpec, derive_stream

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def stream():
    """stream(k, *fork) -> independent, reproducible generator."""

    def make(k=0, *fork, base=12345):
        return derive_stream(SeedSpec(base, 0, k), *fork)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
