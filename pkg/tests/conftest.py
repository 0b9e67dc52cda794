"""Shared pytest wiring: the acceptance summary block.

Acceptance tests register one (number, name, passed) row each; the terminal
summary prints them as a fixed-format block so a run's verdicts are visible
without -s.
"""

_ACCEPTANCE_RESULTS: list[tuple[int, str, bool]] = []


def record_acceptance(number: int, name: str, passed: bool) -> None:
    _ACCEPTANCE_RESULTS.append((number, name, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed in sorted(_ACCEPTANCE_RESULTS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} {name}: {verdict}")
