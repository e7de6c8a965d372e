import math

import pytest

AT_RES = math.sqrt(15.0) / 2.0


@pytest.fixture
def at_res():
    return AT_RES


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
