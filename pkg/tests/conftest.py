"""Collects acceptance outcomes and prints one line per criterion at the end."""
import pytest

_RESULTS = {}
_DETAILS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.fixture
def detail(request):
    """Dict a criterion test fills with measured values for the summary line."""
    mark = request.node.get_closest_marker("criterion")
    d = _DETAILS.setdefault(mark.args[0] if mark else request.node.nodeid, {})
    return d


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS[mark.args[0]] = (mark.args[1], report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, outcome = _RESULTS[num]
        status = "PASS" if outcome == "passed" else "FAIL"
        info = ", ".join(f"{k}={v}" for k, v in _DETAILS.get(num, {}).items())
        terminalreporter.write_line(f"criterion {num}: {status}  {title}" + (f"  [{info}]" if info else ""))
