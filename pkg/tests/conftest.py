import time

import pytest

_results = {}
_started = time.perf_counter()
SUITE_BUDGET_S = 60.0


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    ok = report.passed if report.when == "call" else not report.failed
    prev = _results.get(number, (title, True))
    _results[number] = (title, prev[1] and ok)


def pytest_sessionfinish(session, exitstatus):
    if _results and time.perf_counter() - _started > SUITE_BUDGET_S and 10 in _results:
        _results[10] = (_results[10][0] + " (suite over time budget)", False)
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    elapsed = time.perf_counter() - _started
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, ok = _results[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}")
    terminalreporter.write_line(f"suite runtime {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)")
