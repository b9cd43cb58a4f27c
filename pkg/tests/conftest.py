import pytest

from respart import builtin

BUILTINS = ["identity", "linear:2", "linear:3", "binary", "smooth_cutoff"]

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture(params=BUILTINS)
def any_builtin(request):
    return builtin(request.param)


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        _criteria.append((name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
