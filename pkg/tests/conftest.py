import random

import pytest
from hypothesis import settings

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


@pytest.fixture
def rng():
    return random.Random(20261015)


_ACCEPTANCE: dict = {}


@pytest.fixture
def record(request):
    """record(ok, detail) stores one PASS/FAIL line for an acceptance criterion."""
    n = int(request.node.name.split("_")[1][1:])

    def rec(ok, detail=""):
        _ACCEPTANCE[n] = (bool(ok), detail)

    yield rec
    _ACCEPTANCE.setdefault(n, (False, "raised before reporting"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
