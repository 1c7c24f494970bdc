import pytest

_AC_LINES_KEY = pytest.StashKey[list]()


@pytest.fixture
def ac_report(request):
    """Collects one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_AC_LINES_KEY, [])
    return lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_AC_LINES_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(line)
