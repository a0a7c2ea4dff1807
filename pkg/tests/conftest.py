"""Shared fixtures and the acceptance-criterion result banner."""

import numpy as np
import pytest

import digitseq as dq

ACCEPTANCE_RESULTS = []


def record_criterion(number, name, ok, detail=""):
    ACCEPTANCE_RESULTS.append((number, name, bool(ok), detail))
    assert ok, f"acceptance criterion {number} ({name}) failed: {detail}"


def _criterion_key(item):
    number = str(item[0])
    head = "".join(c for c in number if c.isdigit())
    return (int(head) if head else 0, number)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE_RESULTS, key=_criterion_key):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number:>3}  {status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def thue_morse():
    return dq.preset("thue-morse")


@pytest.fixture(scope="session")
def rudin_shapiro():
    return dq.preset("rudin-shapiro")


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
