import math

import pytest

from giant_ssh.lattice import AtomCoupling, SshParams

PI = math.pi


@pytest.fixture
def fig1_params():
    return SshParams(L=100, q=1.0, delta=0.5, theta=0.8 * PI)


@pytest.fixture
def fig3_params():
    return SshParams(L=100, q=1.0, delta=0.5, theta=0.8 * PI)


@pytest.fixture
def fig3_aa():
    return AtomCoupling("AA", 50, 55, 1.0)


@pytest.fixture
def fig3_ab():
    return AtomCoupling("AB", 50, 55, 1.0)


_REPORT_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_REPORT_KEY, [])

    def record(label: str, passed: bool | None, detail: str) -> None:
        status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        lines.append(f"criterion {label}: {status}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
