from collections import defaultdict

import pytest

_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[crit].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_outcomes):
        results = _outcomes[crit]
        if all(r == "passed" for r in results):
            verdict = "PASS"
        elif any(r == "failed" for r in results):
            verdict = "FAIL"
        else:
            verdict = "NOT RUN"
        n_ok = sum(r == "passed" for r in results)
        terminalreporter.write_line(f"criterion {crit:2d}: {verdict}  ({n_ok}/{len(results)} checks passed)")
