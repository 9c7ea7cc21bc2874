from __future__ import annotations


def pytest_terminal_summary(terminalreporter):
    """Echo the per-criterion PASS/FAIL lines of the acceptance suite."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance" in rep.nodeid and rep.when == "call":
                lines += [ln for ln in rep.capstdout.splitlines() if ln.startswith("criterion")]
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines):
            terminalreporter.write_line(ln)
