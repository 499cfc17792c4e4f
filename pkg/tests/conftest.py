import os
import time
from contextlib import contextmanager

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


_CRITERIA: list[tuple[int, str, bool, float, float, str]] = []


@contextmanager
def _criterion(number: int, title: str, budget: float):
    start = time.perf_counter()
    notes: list[str] = []
    try:
        yield notes
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        _CRITERIA.append((number, title, False, elapsed, budget, f"{type(exc).__name__}: {exc}".splitlines()[0]))
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    _CRITERIA.append((number, title, ok, elapsed, budget, "; ".join(notes)))
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title} ({elapsed:.3f}s < {budget:g}s)"
    print(line)
    assert ok, f"criterion {number} exceeded its {budget}s budget ({elapsed:.2f}s)"


@pytest.fixture
def criterion():
    """Context manager timing one acceptance criterion and recording its verdict."""
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, budget, note in sorted(_CRITERIA):
        mark = "PASS" if ok else "FAIL"
        tail = f"  {note}" if note else ""
        terminalreporter.write_line(f"{mark}  {number:2d}. {title:<46} {elapsed:7.3f}s / {budget:g}s{tail}")
