import pytest

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}
_TOTAL = 12


@pytest.fixture
def acceptance():
    """Record the verdict of one acceptance criterion for the end-of-run summary."""
    def record(criterion: int, passed: bool, detail: str):
        _ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in range(1, _TOTAL + 1):
        if k in _ACCEPTANCE:
            ok, detail = _ACCEPTANCE[k]
            terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {k:2d}: NOT RUN")
