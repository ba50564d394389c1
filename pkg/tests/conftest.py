import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record one summary line for an acceptance criterion.

    Call ``acceptance(number, title, measured, passed)`` before asserting so
    that failures are listed too.
    """
    lines = request.config.stash[_ACCEPTANCE]

    def record(number: int, title: str, measured: str, passed: bool) -> bool:
        lines[number] = (title, measured, bool(passed))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        title, measured, passed = lines[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  [{number:2d}] {title}: {measured}")
    failed = sum(not passed for _, _, passed in lines.values())
    terminalreporter.write_line(f"{len(lines) - failed}/{len(lines)} criteria met")
