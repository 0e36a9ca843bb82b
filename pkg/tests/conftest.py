"""Shared test plumbing: one pass/fail line per acceptance criterion."""

from __future__ import annotations

from contextlib import contextmanager

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@contextmanager
def criterion(name: str):
    """Record the outcome of one acceptance criterion for the summary."""
    try:
        yield
    except BaseException as exc:
        _ACCEPTANCE.append((name, False, f"{type(exc).__name__}: {exc}"))
        raise
    else:
        _ACCEPTANCE.append((name, True, ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {name}"
        if detail and not passed:
            line += f" ({detail[:120]})"
        terminalreporter.write_line(line)
