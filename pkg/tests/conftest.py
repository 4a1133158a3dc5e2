from __future__ import annotations

import mpmath
import pytest

mpmath.mp.dps = 60


@pytest.fixture
def mp():
    return mpmath.mp


_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    n = mark.args[0]
    status = "PASS" if call.excinfo is None else "FAIL"
    prev = _CRITERIA.get(n)
    if prev is not None and prev[1] == "FAIL":
        status = "FAIL"
    _CRITERIA[n] = (item.name, status, (prev[2] if prev else 0.0) + call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        name, status, secs = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {name}  ({secs:.2f} s)")
