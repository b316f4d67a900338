from dataclasses import dataclass

import pytest

_REPORTS = pytest.StashKey[list]()


@dataclass
class CriterionReport:
    number: int
    title: str
    passed: bool | None = None
    detail: str = ""

    def line(self) -> str:
        status = {True: "PASS", False: "FAIL", None: "FAIL"}[self.passed]
        detail = self.detail or "did not complete"
        return f"[{status}] criterion {self.number}: {self.title}: {detail}"


def pytest_configure(config):
    config.stash[_REPORTS] = []


@pytest.fixture
def criterion(request):
    """Open a report for one acceptance criterion; it is printed in the summary."""
    opened = []

    def open_report(number: int, title: str) -> CriterionReport:
        report = CriterionReport(number, title)
        opened.append(report)
        return report

    yield open_report
    request.config.stash[_REPORTS].extend(opened)


def pytest_terminal_summary(terminalreporter, config):
    reports = sorted(config.stash.get(_REPORTS, []), key=lambda r: r.number)
    if not reports:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for r in reports:
        terminalreporter.write_line(r.line())
