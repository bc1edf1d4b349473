import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (passed, title, detail), filled from acceptance tests
_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props or report.when == "teardown":
        return
    if report.when == "setup" and report.passed:
        return
    _CRITERIA[props["criterion"]] = (report.passed, props.get("title", ""), props.get("detail", report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, title, detail = _CRITERIA[n]
        terminalreporter.write_line(f"C{n:<3}{'PASS' if ok else 'FAIL'}  {title}: {detail}")
    passed = sum(ok for ok, _, _ in _CRITERIA.values())
    terminalreporter.write_line(f"{passed}/{len(_CRITERIA)} criteria passed")
