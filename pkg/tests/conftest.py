import pytest
from hypothesis import HealthCheck, settings

from manna.core import Instance

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def two_by_two():
    return Instance.from_rows([[2, 0], [0, 2]])


def pytest_terminal_summary(terminalreporter):
    import report
    if report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(report.LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
