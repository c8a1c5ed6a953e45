from __future__ import annotations

import pytest

from cycsrg.field import build_field
from cycsrg.srg import make_context, make_small_context


@pytest.fixture(scope="session")
def f73():
    return build_field(7, 3)


@pytest.fixture(scope="session")
def ctx73():
    """q=7, m=3, N=19 with omega = gamma^{344} inside F_{7^6}."""
    return make_context(7, 3, 19)


@pytest.fixture(scope="session")
def ctx77():
    """Standalone F_{7^7}, N=29."""
    return make_small_context(7, 7, 29)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
