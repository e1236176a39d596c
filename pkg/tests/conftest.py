"""Collects the acceptance-criterion verdicts and prints one line per criterion."""

import re

_VERDICTS = {}
_CRIT = re.compile(r"test_criterion_(\d+)_(\w+(?:\[[^\]]*\])?)")


def pytest_runtest_logreport(report):
    m = _CRIT.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if report.skipped:
            verdict = "SKIP"
        else:
            verdict = "PASS" if report.passed else "FAIL"
        _VERDICTS[key] = verdict


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), verdict in sorted(_VERDICTS.items()):
        terminalreporter.write_line(f"criterion {num:>2} {name.replace('_', ' '):<40} {verdict}")
