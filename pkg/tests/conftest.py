"""Collects per-criterion outcomes from test_acceptance.py for a terminal summary."""

ACCEPTANCE = {}


def record(criterion, ok, detail):
    """Merge a sub-check into the criterion's line; any failing part fails it."""
    prev_ok, prev_detail = ACCEPTANCE.get(criterion, (True, ""))
    joined = f"{prev_detail}; {detail}" if prev_detail else detail
    ACCEPTANCE[criterion] = (prev_ok and bool(ok), joined)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0][1:])):
        ok, detail = ACCEPTANCE[criterion]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
