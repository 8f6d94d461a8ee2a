import os
import sys

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SEED = int(os.environ.get("NORMALZETA_TEST_SEED", "20240611"))

_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long exhaustive sweeps, run with NORMALZETA_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("NORMALZETA_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="long sweep; set NORMALZETA_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def seed():
    return SEED


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion."""

    def report(criterion: str, ok: bool, detail: str):
        _LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
        print(_LINES[-1], file=sys.stderr)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
