import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.failed:
        _CRITERIA[name] = "FAIL"
    elif report.when == "call":
        _CRITERIA.setdefault(name, "SKIP" if report.skipped else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"{status}  {name}")
