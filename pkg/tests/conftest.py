"""Shared fixtures and the per-criterion pass/fail summary."""
import numpy as np
import pytest

_CRITERIA: dict[int, dict] = {}



@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    entry = _CRITERIA.setdefault(n, dict(title=marker.args[1] if len(marker.args) > 1 else "",
                                         passed=True, failures=[]))
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["passed"] = False
        entry["failures"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["passed"] else "FAIL"
        tail = f"  (failing: {', '.join(e['failures'])})" if e["failures"] else ""
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {e['title']}{tail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
