"""Shared pytest configuration.

Acceptance tests attach a one-line summary with ``record_property("detail", ...)``;
the terminal summary prints one PASS/FAIL line per criterion.
"""
import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE[report.nodeid] = (report.outcome, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (outcome, detail, dur) in sorted(_ACCEPTANCE.items(), key=lambda kv: kv[0]):
        name = nodeid.split("::")[-1]
        tag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{tag}  {name}  ({dur:.1f}s)  {detail}")


@pytest.fixture
def detail(record_property):
    """Call with a string to attach it to the acceptance summary line."""
    def put(text):
        record_property("detail", text)
    return put
