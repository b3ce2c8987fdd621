from collections import OrderedDict

import pytest

_CRITERIA = OrderedDict()


@pytest.fixture
def criterion(request):
    """Record check outcomes for one acceptance criterion.

    Usage: ``criterion(n, label, ok, detail)``; the assertion still happens in
    the test, this only feeds the summary printed at the end of the session.
    """

    def record(n, label, ok, detail=""):
        _CRITERIA.setdefault(n, []).append((label, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        checks = _CRITERIA[n]
        ok = all(c[1] for c in checks)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({sum(c[1] for c in checks)}/{len(checks)} checks)")
        for label, passed, detail in checks:
            if not passed:
                tr.write_line(f"    failed: {label} {detail}")
