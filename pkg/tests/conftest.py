from __future__ import annotations

import pytest

CRITERIA = {
    1: "regular closure dimension equals predicted total plus center",
    2: "sum of squared module dimensions equals the group order",
    3: "center dimension and central class sums",
    4: "defining relations and one-dimensional commutants",
    5: "weight-block branching matches predecessor lists",
    6: "block classification at n = 6",
    7: "invariant form parity and nondegeneracy",
    8: "intertwiner identities",
    9: "type A cross-check and the D_3 / S_4 coincidence",
    10: "exterior powers realize the arm-and-leg blocks",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(marker.args[0], []).append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number, text in CRITERIA.items():
        results = _outcomes.get(number)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status:7s} {text} ({len(results or [])} tests)")
