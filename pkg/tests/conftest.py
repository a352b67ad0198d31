import pytest

# criterion number -> list of (part, passed, detail)
_ACCEPTANCE: dict[int, list] = {}


@pytest.fixture
def record():
    """Log one acceptance check before asserting it, so failures still get a line."""

    def _record(criterion: int, part: str, passed: bool, detail: str):
        _ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[c]
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"criterion {c:2d}: {'PASS' if ok else 'FAIL'}")
        for part, passed, detail in parts:
            tr.write_line(f"    [{'pass' if passed else 'FAIL'}] {part}: {detail}")
