"""Shared fixtures and the acceptance-line reporter.

Acceptance tests record one ``ACCEPTANCE <criterion>[clause]: PASS|FAIL``
line per checked clause through the ``acceptance`` fixture; the collected
lines are printed in a dedicated section at the end of the pytest run so
the verdicts are visible regardless of output capture.
"""

from __future__ import annotations

import numpy as np
import pytest

from admlink.constellation import build_dapsk_mapping, build_dpsk_mapping

_ACCEPTANCE_LINES: list[str] = []


class AcceptanceReporter:
    """Records pass/fail lines for acceptance clauses and raises on failure."""

    def __init__(self, criterion: str):
        self.criterion = criterion
        self.failures: list[str] = []
        self.finished = False

    def check(self, clause: str, ok: bool, detail: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        line = f"ACCEPTANCE {self.criterion}[{clause}]: {verdict} — {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        if not ok:
            self.failures.append(f"{clause}: {detail}")

    def finish(self) -> None:
        self.finished = True
        assert not self.failures, (
            f"{self.criterion}: {len(self.failures)} clause(s) failed: "
            + "; ".join(self.failures)
        )


@pytest.fixture
def acceptance(request):
    name = request.node.name.removeprefix("test_")
    reporter = AcceptanceReporter(name)
    yield reporter
    # enforce in teardown only if the test body never called finish()
    if not reporter.finished:
        reporter.finish()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def dpsk_mapping():
    return build_dpsk_mapping()


@pytest.fixture(scope="session")
def dapsk_mapping_r2():
    return build_dapsk_mapping(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
