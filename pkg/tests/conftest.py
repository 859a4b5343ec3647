import sys
from pathlib import Path

import pytest

from rfidsim import kernels

sys.path.insert(0, str(Path(__file__).parent))

PAPER_FOUR = ("011010", "010101", "110001", "011111")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = kernels.BACKEND
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion this test checks"
    )
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    results = item.config._criteria
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        prev = results.get(number, (title, "PASS"))[1]
        results[number] = (title, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config._criteria
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, verdict = results[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
