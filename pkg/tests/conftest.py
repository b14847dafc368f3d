import contextlib
import time

import pytest
from hypothesis import HealthCheck, settings

from goldlab.hypotheses import fresh_registry

settings.register_profile(
    "goldlab",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("goldlab")

_ACCEPTANCE: list = []


@pytest.fixture(autouse=True)
def registry():
    with fresh_registry() as reg:
        yield reg


@pytest.fixture
def criterion():
    """Time a block, record one pass/fail line for it, and enforce its runtime limit."""

    @contextlib.contextmanager
    def run(number: int, title: str, limit: float):
        start = time.perf_counter()
        try:
            yield
        except BaseException as e:
            elapsed = time.perf_counter() - start
            _ACCEPTANCE.append((number, title, False, elapsed, limit, f"{type(e).__name__}: {e}".splitlines()[0]))
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < limit
        _ACCEPTANCE.append((number, title, ok, elapsed, limit, "" if ok else "over the time limit"))
        assert ok, f"criterion {number} took {elapsed:.2f}s (limit {limit}s)"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, limit, note in sorted(_ACCEPTANCE):
        mark = "PASS" if ok else "FAIL"
        line = f"[{mark}] {number}. {title} ({elapsed:.2f}s, limit {limit:g}s)"
        if note:
            line += f" {note}"
        terminalreporter.write_line(line)
